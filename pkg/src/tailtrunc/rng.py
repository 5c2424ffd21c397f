"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, *stream_ids)`` through
:class:`numpy.random.SeedSequence`, so replication ``r`` of a simulation can
be drawn without touching replications ``0..r-1``.
"""
from __future__ import annotations

import numpy as np

_MANTISSA = 2.0**53


def make_rng(seed, *stream) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("stream ids need an integer seed")
        return seed
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform variates strictly inside (0, 1)."""
    bits = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (bits + 0.5) / _MANTISSA


def derive_seed(seed: int, *stream) -> int:
    """A 64-bit child seed, used to give each simulation cell its own key."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
