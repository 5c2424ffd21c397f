"""Pareto and truncated-Pareto QQ-plot coordinates and anchor selection."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoCandidate
from .estimators import DEFAULT_TOL, path_arrays
from .sample import as_sample


@dataclass(frozen=True)
class QQPlot:
    """Points ``(log X_{n-j+1,n}, log(d + j/n))`` for ``j = 1..n``."""

    x: np.ndarray
    y: np.ndarray
    kind: str
    d_used: float = 0.0
    k_star: Optional[int] = None
    correlation: Optional[float] = None

    @property
    def points(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    def __len__(self):
        return int(self.x.size)

    def to_csv(self) -> str:
        """Two-column ``x,y`` CSV preceded by one ``#`` metadata line."""
        def f(v):
            if v is None:
                return "none"
            return repr(float(v)) if not isinstance(v, int) else str(v)

        buf = io.StringIO()
        buf.write(f"# kind={self.kind} k_star={f(self.k_star)} d_used={f(self.d_used)} "
                  f"correlation={f(self.correlation)}\n")
        buf.write("x,y\n")
        for a, b in zip(self.x.tolist(), self.y.tolist()):
            buf.write(f"{a!r},{b!r}\n")
        return buf.getvalue()


def _coords(s, d):
    n = s.n
    x = np.log(s.values[::-1])
    y = np.log(d + np.arange(1, n + 1) / n)
    return x, y


def pareto_qq(sample) -> QQPlot:
    s = as_sample(sample)
    if s.n < 2:
        raise ValueError("need at least two observations")
    x, y = _coords(s, 0.0)
    return QQPlot(x, y, "pareto", 0.0, None, top_correlation(x, y, s.n))


def tpa_qq(sample, d: float, k_star: Optional[int] = None) -> QQPlot:
    """Truncated-Pareto QQ-plot for a given odds estimate ``d >= 0``.

    With ``d = 0`` the points coincide with :func:`pareto_qq`.
    """
    s = as_sample(sample)
    if s.n < 2:
        raise ValueError("need at least two observations")
    if not d >= 0:
        raise ValueError("d must be nonnegative")
    x, y = _coords(s, float(d))
    kk = s.n if k_star is None else int(k_star)
    return QQPlot(x, y, "tpa", float(d), k_star, top_correlation(x, y, kk))


def top_correlation(x, y, k) -> Optional[float]:
    """Pearson correlation of the first ``k`` points; ``None`` if undefined."""
    xs = x[:k] - x[:k].mean()
    ys = y[:k] - y[:k].mean()
    denom = math.sqrt(float(xs @ xs) * float(ys @ ys))
    if denom == 0:
        return None
    return float(xs @ ys) / denom


def candidate_odds(sample, ks, tol: float = DEFAULT_TOL):
    """Admissible odds estimates at each ``k``; ``nan`` where the solve fails."""
    s = as_sample(sample)
    ks = np.asarray(ks, dtype=int)
    pa = path_arrays(s.values, ks, tol)
    ra = np.exp(pa["alpha"] * pa["logr"])
    d = (ks + 1.0) / (s.n + 1.0) * (ra - 1.0 / (ks + 1.0)) / (1.0 - ra)
    return np.maximum(d, 0.0)


def select_k_star(sample, k_min: int = 11, stride: int = 1, tol: float = DEFAULT_TOL):
    """Anchor ``k*`` maximising the linearity of the top-``k*`` TPa QQ points.

    For every candidate ``k*`` in ``[k_min, n-1]`` (every ``stride``-th), the
    odds are re-estimated at ``k*`` and the correlation between
    ``log X_{n-j+1,n}`` and ``log(d + j/n)``, ``j = 1..k*``, is computed. The
    candidate with the largest absolute correlation wins; ties go to the
    smallest ``k*``. Candidates whose index solve fails are skipped.

    Returns
    -------
    (k_star, correlation)
    """
    s = as_sample(sample)
    n = s.n
    if not (k_min >= 2 and n > k_min):
        raise ValueError(f"need n > k_min >= 2, got n={n}, k_min={k_min}")
    ks = np.arange(k_min, n, max(int(stride), 1))
    d = candidate_odds(s, ks, tol)
    x = np.log(s.values[::-1])
    j = np.arange(1, n + 1) / n
    best_k, best_c = None, None
    for k, dk in zip(ks.tolist(), d.tolist()):
        if not math.isfinite(dk):
            continue
        c = top_correlation(x, np.log(dk + j), k)
        if c is None:
            continue
        if best_c is None or abs(c) > abs(best_c):
            best_k, best_c = k, c
    if best_k is None:
        raise NoCandidate("no candidate k* yielded a usable fit")
    return best_k, best_c


def tpa_qq_auto(sample, k_min: int = 11, stride: int = 1, tol: float = DEFAULT_TOL) -> QQPlot:
    """:func:`tpa_qq` at the automatically selected anchor."""
    s = as_sample(sample)
    k, c = select_k_star(s, k_min, stride, tol)
    d = float(candidate_odds(s, [k], tol)[0])
    plot = tpa_qq(s, d)
    return QQPlot(plot.x, plot.y, "tpa", d, k, c)
