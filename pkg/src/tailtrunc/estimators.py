"""Tail-index, odds-ratio, extreme-quantile and endpoint estimators.

All estimators work on the top ``k`` order statistics of a
:class:`~tailtrunc.sample.SortedSample` anchored at ``X_{n-k,n}``. The
truncated-Pareto index solves

    H = 1/a + R**a * log(R) / (1 - R**a)

with ``H`` the Hill statistic and ``R = X_{n-k,n}/X_{n,n}``; a positive root
exists iff ``0 < H < -log(R)/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .errors import DegenerateMoments, NoRoot, NonConvergence, TailError, TiedExtremes
from .sample import as_sample, check_k

DEFAULT_TOL = 1e-12
NEWTON_MAXITER = 50
BISECT_MAXITER = 200
ALPHA_FLOOR = 1e-12
ALPHA_CEIL = 1e3

# Series x/(exp(x)-1) = sum B_m x^m / m!, used where 1/a and the ratio term cancel.
_SERIES_SWITCH = 0.05


def _mean_log_excess(alpha, logr):
    """E[log(W/t) | t < W < T] for a strict Pareto with log(t/T) = logr."""
    x = alpha * logr
    small = np.abs(x) < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    # g = logr * (-1/2 - x/12 + x^3/720 - x^5/30240 + x^7/1209600)
    x2 = xs * xs
    series = logr * (-0.5 + xs * (-1.0 / 12 + x2 * (1.0 / 720 + x2 * (-1.0 / 30240 + x2 / 1209600))))
    xd = np.where(small, -1.0, x)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = 1.0 / alpha + logr * np.exp(xd) / (-np.expm1(xd))
    return np.where(small, series, direct)


def _dlog_excess_dxi(alpha, logr):
    """Derivative of the mean log-excess with respect to 1/alpha; lies in [0, 1)."""
    s = 0.5 * alpha * logr
    small = np.abs(s) < 1e-2
    s2 = np.where(small, s, 0.0) ** 2
    series = s2 * (1.0 / 3 - s2 * (1.0 / 15 - s2 * 2.0 / 189))
    sb = np.where(small, 1.0, s)
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = np.where(np.abs(sb) > 700, 0.0, sb / np.sinh(sb))
    direct = 1.0 - ratio * ratio
    return np.where(small, series, direct)


def solve_alpha_array(h, logr, tol: float = DEFAULT_TOL):
    """Vectorised root of the truncated-Pareto likelihood equation.

    Parameters
    ----------
    h : array_like
        Hill statistics (left-hand side).
    logr : array_like
        ``log R`` values, strictly negative.
    tol : float
        Convergence tolerance on successive iterates of ``1/alpha`` (relative)
        and on the equation residual.

    Returns
    -------
    alpha : ndarray
        Roots; ``nan`` where no root exists.
    status : ndarray of str
        ``"ok"``, ``"no_root"`` or ``"no_convergence"`` per element.

    Notes
    -----
    Newton-Raphson runs in ``xi = 1/alpha`` from ``xi = h``. Each step is kept
    inside a bracket that shrinks with the sign of the residual; a step that
    leaves the bracket is replaced by a bisection step, and after
    ``NEWTON_MAXITER`` iterations only bisection is used.
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))
    logr = np.atleast_1d(np.asarray(logr, dtype=float))
    h, logr = np.broadcast_arrays(h, logr)
    h = h.astype(float)
    logr = logr.astype(float)
    alpha = np.full(h.shape, np.nan)
    status = np.full(h.shape, "no_root", dtype=object)

    ok = (h > 0) & (logr < 0) & np.isfinite(h) & np.isfinite(logr) & (h < -0.5 * logr)
    if not ok.any():
        return alpha, status
    hh = h[ok]
    lr = logr[ok]

    def resid(xi):
        return hh - _mean_log_excess(1.0 / xi, lr)

    xi_lo = 1.0 / np.maximum(10.0 / hh, ALPHA_CEIL)
    xi_hi = np.full_like(hh, 1.0 / ALPHA_FLOOR)
    f_hi = resid(xi_hi)
    # root below the alpha floor: numerically indistinguishable from the boundary
    inside = f_hi < 0
    xi = hh.copy()
    done = ~inside
    converged = np.zeros_like(done)
    for it in range(NEWTON_MAXITER + BISECT_MAXITER):
        active = ~done
        if not active.any():
            break
        f = resid(xi)
        hit = active & (np.abs(f) == 0)
        converged |= hit
        done |= hit
        pos = f > 0
        xi_lo = np.where(active & pos, xi, xi_lo)
        xi_hi = np.where(active & ~pos, xi, xi_hi)
        if it < NEWTON_MAXITER:
            fp = -_dlog_excess_dxi(1.0 / xi, lr)
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = xi - f / fp
        else:
            cand = np.full_like(xi, np.nan)
        bad = ~np.isfinite(cand) | (cand <= xi_lo) | (cand >= xi_hi)
        wide = xi_hi > 4.0 * xi_lo
        mid = np.where(wide, np.sqrt(xi_lo * xi_hi), 0.5 * (xi_lo + xi_hi))
        new = np.where(bad, mid, cand)
        step_small = np.abs(new - xi) <= tol * np.abs(xi)
        bracket_small = (xi_hi - xi_lo) <= tol * xi_lo
        fin = active & ~done & (step_small | bracket_small)
        xi = np.where(active & ~done, new, xi)
        converged |= fin
        done |= fin

    res = np.abs(resid(xi))
    good = inside & converged & (res < max(tol, 64 * np.finfo(float).eps * 1.0))
    sub_alpha = np.where(good, 1.0 / xi, np.nan)
    sub_status = np.where(good, "ok", np.where(inside, "no_convergence", "no_root")).astype(object)
    alpha[ok] = sub_alpha
    status[ok] = sub_status
    return alpha, status


def solve_alpha(h: float, r: float, tol: float = DEFAULT_TOL) -> float:
    """Solve ``h = 1/a + r**a log r / (1 - r**a)`` for ``a > 0``.

    Raises
    ------
    NoRoot
        If ``h >= -log(r)/2`` (or ``h <= 0``): no positive root exists.
    NonConvergence
        If the safeguarded iteration fails to meet ``tol``.
    """
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    logr = math.log(r)
    if not (h > 0 and h < -0.5 * logr):
        raise NoRoot(f"no root for H={h!r}, R={r!r}: need 0 < H < {-0.5 * logr!r}")
    alpha, status = solve_alpha_array(h, logr, tol)
    if status[0] == "no_root":
        raise NoRoot(f"root for H={h!r}, R={r!r} lies below alpha={ALPHA_FLOOR}")
    if status[0] != "ok":
        raise NonConvergence(f"solver failed for H={h!r}, R={r!r}")
    return float(alpha[0])


def likelihood_residual(alpha: float, h: float, r: float) -> float:
    """Residual ``h - 1/a - r**a log r / (1 - r**a)``."""
    return h - float(_mean_log_excess(np.float64(alpha), np.float64(math.log(r))))


def _exp(x: float) -> float:
    """exp that returns inf instead of raising; tiny index estimates extrapolate that far."""
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# --- basic statistics --------------------------------------------------------

def hill(sample, k: int) -> float:
    """Hill statistic: mean log-excess of the top k over X_{n-k,n}."""
    s = as_sample(sample)
    k = check_k(s, k)
    # log of ratios rather than difference of logs: exact under rescaling
    return float(np.mean(np.log(s.values[s.n - k:] / s.threshold(k))))


def ratio_stat(sample, k: int) -> float:
    """R_{k,n} = X_{n-k,n} / X_{n,n}."""
    s = as_sample(sample)
    k = check_k(s, k)
    return s.threshold(k) / s.maximum


def alpha_trunc(sample, k: int, tol: float = DEFAULT_TOL) -> float:
    """Truncated-Pareto conditional MLE of the tail index at ``k``."""
    s = as_sample(sample)
    k = check_k(s, k)
    r = ratio_stat(s, k)
    if r >= 1:
        raise TiedExtremes(f"X_(n-k,n) equals the maximum at k={k}")
    return solve_alpha(hill(s, k), r, tol)


def alpha_trunc_trimmed(sample, r: int, k: int, tol: float = DEFAULT_TOL) -> float:
    """Index estimate after discarding the ``r - 1`` largest observations.

    The Hill part averages log-excesses of X_{n-j+1,n}, j = r..k, over
    X_{n-k,n} and the ratio is X_{n-k,n}/X_{n-r+1,n}. ``r = 1`` reproduces
    :func:`alpha_trunc`.
    """
    s = as_sample(sample)
    k = check_k(s, k)
    r = int(r)
    if not 1 <= r <= k:
        raise ValueError(f"trim r={r} outside 1..{k}")
    top_r = s.top(r)
    base = s.threshold(k)
    if base >= top_r:
        raise TiedExtremes(f"X_(n-k,n) equals X_(n-r+1,n) at r={r}, k={k}")
    h = float(np.mean(np.log(s.values[s.n - k:s.n - r + 1] / base)))
    return solve_alpha(h, base / top_r, tol)


def tau_hat(sample, k: int, alpha: float) -> float:
    """Conditional MLE of the Pareto scale given ``alpha``."""
    s = as_sample(sample)
    k = check_k(s, k)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    n = s.n
    ra = ratio_stat(s, k) ** alpha
    inner = n - (n - k) * ra
    # k < inner <= n, so the power only shrinks X_{n-k,n}; log form avoids overflow for tiny alpha
    return float(s.threshold(k) * math.exp((math.log(k) - math.log(inner)) / alpha))


def _odds(k, n, ra):
    return (k + 1.0) / (n + 1.0) * (ra - 1.0 / (k + 1.0)) / (1.0 - ra)


def d_hat(sample, k: int, alpha: float) -> float:
    """Odds-ratio estimate of D_T; may be negative."""
    s = as_sample(sample)
    k = check_k(s, k)
    ra = ratio_stat(s, k) ** alpha
    if ra >= 1:
        raise TiedExtremes(f"R**alpha == 1 at k={k}")
    return float(_odds(k, s.n, ra))


def d_hat_admissible(sample, k: int, alpha: float) -> float:
    return max(d_hat(sample, k, alpha), 0.0)


def quantile_trunc(sample, k: int, p: float, d: float, alpha: float) -> float:
    """Extreme quantile Q_T(1-p) under a truncated Pareto-type tail."""
    s = as_sample(sample)
    k = check_k(s, k)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    pk = (k + 1.0) / (s.n + 1.0)
    if not d + p > 0:
        raise ValueError(f"d + p must be positive, got d={d!r}, p={p!r}")
    if p == pk:
        return s.threshold(k)
    return s.threshold(k) * _exp(math.log((d + pk) / (d + p)) / alpha)


def quantile_light(sample, k: int, p: float, alpha: float) -> float:
    """Weissman-type extrapolation with exponent 1/alpha (light truncation)."""
    return quantile_trunc(sample, k, p, 0.0, alpha)


def quantile_weissman(sample, k: int, p: float) -> float:
    s = as_sample(sample)
    k = check_k(s, k)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return s.threshold(k) * _exp(hill(s, k) * math.log((k + 1.0) / ((s.n + 1.0) * p)))


def endpoint_hat(sample, k: int, d: float, alpha: float) -> float:
    """Endpoint estimate, clamped at the sample maximum.

    Returns ``math.inf`` when ``d == 0``: no finite endpoint is detected.
    """
    s = as_sample(sample)
    k = check_k(s, k)
    if d < 0:
        raise ValueError("d must be nonnegative")
    if d == 0:
        return math.inf
    pk = (k + 1.0) / (s.n + 1.0)
    raw = s.threshold(k) * _exp(math.log((d + pk) / d) / alpha)
    return max(raw, s.maximum)


# --- moment estimator baseline ----------------------------------------------

@dataclass(frozen=True)
class MomFit:
    k: int
    m1: float
    m2: float
    xi_minus: float
    xi_mom: float


def mom_fit(sample, k: int) -> MomFit:
    """Moment estimator of the extreme value index from the top k log-excesses."""
    s = as_sample(sample)
    k = check_k(s, k)
    ex = np.log(s.values[s.n - k:] / s.threshold(k))
    m1 = float(np.mean(ex))
    m2 = float(np.mean(ex * ex))
    # 1 - M1^2/M2 = var/M2, with the variance taken in two passes to avoid cancellation
    var = float(np.mean((ex - m1) ** 2))
    if m2 == 0 or var <= 0:
        raise DegenerateMoments(f"M2={m2!r}, M1^2={m1 * m1!r} at k={k}")
    xi_minus = 1.0 - 0.5 * m2 / var
    return MomFit(k, m1, m2, xi_minus, m1 + xi_minus)


def _mom_extrapolate(base, m1, xi_minus, xi, factor):
    scale = base * m1 * (1.0 - xi_minus)
    lf = math.log(factor)
    if xi == 0:
        return base + scale * lf
    # (factor**xi - 1)/xi written with expm1 so xi -> 0 is continuous;
    # overflow (factor < 1 with very negative xi) gives -inf as in the array path
    with np.errstate(over="ignore"):
        growth = np.expm1(xi * lf) / xi
    return float(base + scale * growth)


def mom_quantile(sample, k: int, p: float, fit: Optional[MomFit] = None) -> float:
    s = as_sample(sample)
    k = check_k(s, k)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    fit = fit or mom_fit(s, k)
    return _mom_extrapolate(s.threshold(k), fit.m1, fit.xi_minus, fit.xi_mom, k / (s.n * p))


def mom_endpoint(sample, k: int, fit: Optional[MomFit] = None) -> float:
    """Admissible moment endpoint; ``math.inf`` when the index is nonnegative."""
    s = as_sample(sample)
    k = check_k(s, k)
    fit = fit or mom_fit(s, k)
    if fit.xi_mom >= 0:
        return math.inf
    base = s.threshold(k)
    raw = base - base * fit.m1 * (1.0 - fit.xi_minus) / fit.xi_mom
    return max(raw, s.maximum)


# --- per-k driver ------------------------------------------------------------

@dataclass(frozen=True)
class TailFit:
    """Estimates at one ``k``. Failed quantities are ``nan``; see ``status``."""

    k: int
    hill: float
    ratio: float
    alpha_trunc: float
    d_raw: float
    d_admissible: float
    tau_hat: float
    endpoint: float
    p: Optional[float] = None
    q_trunc: float = math.nan
    q_light: float = math.nan
    q_weissman: float = math.nan
    q_mom: float = math.nan
    endpoint_mom: float = math.nan
    mom: Optional[MomFit] = None
    status: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.status


_STATUS = {NoRoot: "no_root", NonConvergence: "no_convergence", TiedExtremes: "tied_extremes",
           DegenerateMoments: "degenerate_moments"}


def _status_of(exc: TailError) -> str:
    for cls, name in _STATUS.items():
        if isinstance(exc, cls):
            return name
    return "error"


def fit_at(sample, k: int, p: Optional[float] = None, *, use_raw_d: bool = False,
           mom: bool = True, tol: float = DEFAULT_TOL) -> TailFit:
    """All estimators at a single ``k`` from one index solve."""
    s = as_sample(sample)
    k = check_k(s, k)
    status = []
    h = hill(s, k)
    r = ratio_stat(s, k)
    nan = math.nan
    a = d_raw = d0 = tau = end = nan
    q_t = q_l = nan
    try:
        a = alpha_trunc(s, k, tol)
    except TailError as exc:
        status.append(_status_of(exc))
    else:
        d_raw = d_hat(s, k, a)
        d0 = max(d_raw, 0.0)
        tau = tau_hat(s, k, a)
        d_use = d_raw if use_raw_d else d0
        end = endpoint_hat(s, k, d_use, a) if d_use > 0 else math.inf
        if p is not None:
            # a negative raw d is usable only while d + p > 0
            if d_use + p > 0:
                q_t = quantile_trunc(s, k, p, d_use, a)
            else:
                status.append("raw_d_out_of_range")
            q_l = quantile_light(s, k, p, a)
    q_w = quantile_weissman(s, k, p) if p is not None else nan
    q_m = end_m = nan
    mfit = None
    if mom:
        try:
            mfit = mom_fit(s, k)
        except TailError as exc:
            status.append(_status_of(exc))
        else:
            end_m = mom_endpoint(s, k, mfit)
            if p is not None:
                q_m = mom_quantile(s, k, p, mfit)
    return TailFit(k=k, hill=h, ratio=r, alpha_trunc=a, d_raw=d_raw, d_admissible=d0,
                   tau_hat=tau, endpoint=end, p=p, q_trunc=q_t, q_light=q_l, q_weissman=q_w,
                   q_mom=q_m, endpoint_mom=end_m, mom=mfit, status=tuple(status))


def fit_path(sample, k_range: Optional[Iterable[int]] = None, p: Optional[float] = None, *,
             use_raw_d: bool = False, mom: bool = True, tol: float = DEFAULT_TOL) -> List[TailFit]:
    """:func:`fit_at` over ``k_range`` (default ``1..n-1``).

    Per-k failures are recorded in ``TailFit.status`` and never raised.
    """
    s = as_sample(sample)
    ks = range(1, s.n) if k_range is None else k_range
    return [fit_at(s, k, p, use_raw_d=use_raw_d, mom=mom, tol=tol) for k in ks]


# --- vectorised path used by the simulation engine ---------------------------

def path_arrays(values: np.ndarray, ks: np.ndarray, tol: float = DEFAULT_TOL):
    """Hill, log R and the index solve for many ``k`` on one sorted array.

    Returns a dict of arrays aligned with ``ks``: ``logs`` (all log values),
    ``hill``, ``logr``, ``alpha`` (nan on failure) and ``status``.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    ks = np.asarray(ks, dtype=int)
    logs = np.log(x)
    # csum[k] = sum of the k largest logs
    csum = np.concatenate(([0.0], np.cumsum(logs[::-1])))
    lthr = logs[n - ks - 1]
    h = csum[ks] / ks - lthr
    h = np.maximum(h, 0.0)
    logr = lthr - logs[-1]
    alpha, status = solve_alpha_array(h, logr, tol)
    status = np.where((logr >= 0) & (status == "no_root"), "tied_extremes", status)
    return {"logs": logs, "hill": h, "logr": logr, "alpha": alpha, "status": status}
