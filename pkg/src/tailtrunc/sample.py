"""Sorted samples with order-statistic access."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SortedSample:
    """Ascending positive observations X_{1,n} <= ... <= X_{n,n}.

    Build it with :meth:`from_values`, which sorts and validates. The
    ``values`` array is made read-only so a sample can be shared freely.
    """

    values: np.ndarray

    @classmethod
    def from_values(cls, values) -> "SortedSample":
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("sample is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample contains non-finite values")
        if np.any(arr <= 0):
            raise ValueError("sample values must be positive")
        arr = np.sort(arr)
        arr.setflags(write=False)
        return cls(arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SortedSample):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def order(self, j: int) -> float:
        """Return X_{j,n} (1-based, ascending)."""
        if not 1 <= j <= self.n:
            raise IndexError(f"order statistic {j} outside 1..{self.n}")
        return float(self.values[j - 1])

    def top(self, j: int) -> float:
        """Return X_{n-j+1,n}, the j-th largest observation."""
        return self.order(self.n - j + 1)

    def threshold(self, k: int) -> float:
        """Return X_{n-k,n}, the anchor below the top k observations."""
        return self.order(self.n - k)

    @property
    def maximum(self) -> float:
        return float(self.values[-1])

    def scaled(self, c: float) -> "SortedSample":
        return SortedSample.from_values(self.values * c)


def as_sample(data) -> SortedSample:
    if isinstance(data, SortedSample):
        return data
    return SortedSample.from_values(data)


def check_k(sample: SortedSample, k: int) -> int:
    k = int(k)
    if not 1 <= k <= sample.n - 1:
        raise ValueError(f"k={k} outside 1..{sample.n - 1}")
    return k
