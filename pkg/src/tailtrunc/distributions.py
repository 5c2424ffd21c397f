"""Pareto, Burr and upper-truncated parent models.

Every model exposes ``cdf``, ``sf`` and ``upper_quantile`` (the value with
right-tail mass ``p``), all vectorised over numpy arrays. Truncated models
wrap a parent ``W`` and condition on ``W <= T``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ModelSpecError
from .rng import make_rng, uniform_open
from .sample import SortedSample


def _fmt(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


@dataclass(frozen=True)
class ParetoModel:
    """Strict Pareto with survival (tau/x)**alpha for x >= tau."""

    alpha: float
    tau: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def lower(self) -> float:
        return self.tau

    @property
    def tail_index(self) -> float:
        return self.alpha

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x <= self.tau, 1.0, (self.tau / x) ** self.alpha)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x <= self.tau, 0.0,
                           -np.expm1(self.alpha * np.log(self.tau / np.maximum(x, self.tau))))
        return out[()] if out.ndim == 0 else out

    def upper_quantile(self, p):
        p = np.asarray(p, dtype=float)
        return self.tau * p ** (-1.0 / self.alpha)

    @property
    def spec(self) -> str:
        if self.tau == 1.0:
            return f"pareto(alpha={_fmt(self.alpha)})"
        return f"pareto(alpha={_fmt(self.alpha)},tau={_fmt(self.tau)})"


@dataclass(frozen=True)
class BurrModel:
    """Burr parent with survival (1 + x**(-rho*alpha))**(1/rho), x > 0."""

    alpha: float
    rho: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.rho < 0:
            raise ValueError(f"rho must be negative, got {self.rho}")

    @property
    def lower(self) -> float:
        return 0.0

    @property
    def tail_index(self) -> float:
        return self.alpha

    def _log_sf(self, x):
        with np.errstate(divide="ignore"):
            return np.log1p(x ** (-self.rho * self.alpha)) / self.rho

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0, 1.0, np.exp(self._log_sf(np.maximum(x, 0.0))))
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0, 0.0, -np.expm1(self._log_sf(np.maximum(x, 0.0))))
        return out[()] if out.ndim == 0 else out

    def upper_quantile(self, p):
        p = np.asarray(p, dtype=float)
        # sf(x) = p  <=>  x**(-rho*alpha) = p**rho - 1
        base = np.expm1(self.rho * np.log(p))
        with np.errstate(divide="ignore"):
            return base ** (-1.0 / (self.rho * self.alpha))

    @property
    def spec(self) -> str:
        return f"burr(alpha={_fmt(self.alpha)},rho={_fmt(self.rho)})"


BaseModel = Union[ParetoModel, BurrModel]


@dataclass(frozen=True)
class TruncatedModel:
    """Parent ``base`` conditioned to lie at or below ``T``.

    ``level`` records the parent quantile level when ``T`` was built as
    ``Q_W(level)``; the parent mass at ``T`` is then taken as ``level``
    itself rather than recomputed through the parent cdf.
    """

    base: BaseModel
    T: float
    level: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.base, TruncatedModel):
            raise ValueError("cannot truncate an already truncated model")
        if not (self.T > self.base.lower and math.isfinite(self.T)):
            raise ValueError(f"truncation point {self.T} must be finite and above {self.base.lower}")

    @classmethod
    def at_level(cls, base: BaseModel, level: float) -> "TruncatedModel":
        if not 0 < level < 1:
            raise ValueError(f"quantile level must be in (0, 1), got {level}")
        T = float(base.upper_quantile(1.0 - level))
        return cls(base, T, float(level))

    @property
    def lower(self) -> float:
        return self.base.lower

    @property
    def tail_index(self) -> float:
        return self.base.alpha

    @property
    def parent_cdf_T(self) -> float:
        if self.level is not None:
            return self.level
        return float(self.base.cdf(self.T))

    @property
    def parent_sf_T(self) -> float:
        if self.level is not None:
            return 1.0 - self.level
        return float(self.base.sf(self.T))

    @property
    def odds(self) -> float:
        return self.parent_sf_T / self.parent_cdf_T

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x > self.T):
            raise ValueError(f"x above the truncation point T={self.T}")
        out = np.minimum(self.base.cdf(x) / self.parent_cdf_T, 1.0)
        out = np.where(x == self.T, 1.0, out)
        return out[()] if out.ndim == 0 else out

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def upper_quantile(self, p):
        p = np.asarray(p, dtype=float)
        out = self.base.upper_quantile(self.parent_sf_T + p * self.parent_cdf_T)
        return np.minimum(out, self.T)

    @property
    def T_spec(self) -> str:
        if self.level is not None:
            return f"Tq={_fmt(self.level)}"
        return f"T={_fmt(self.T)}"

    @property
    def spec(self) -> str:
        return f"trunc({self.base.spec},{self.T_spec})"


TailModel = Union[ParetoModel, BurrModel, TruncatedModel]


def _check_x(model, x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise ValueError("x must be nonnegative")
    return x


def cdf(model: TailModel, x):
    """F(x); zero below the lower support bound."""
    return model.cdf(_check_x(model, x))


def upper_quantile(model: TailModel, p):
    """Q(1 - p): the value with right-tail mass ``p``, for 0 < p <= 1."""
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p <= 1))):
        raise ValueError("p must lie in (0, 1]")
    out = model.upper_quantile(p)
    return float(out) if np.ndim(out) == 0 else out


def true_odds(model: TailModel) -> float:
    """D_T = P_W(W > T) / P_W(W <= T); zero for an untruncated model."""
    if isinstance(model, TruncatedModel):
        return model.odds
    return 0.0


def truncation_point(model: TailModel) -> float:
    return model.T if isinstance(model, TruncatedModel) else math.inf


def draw(model: TailModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unsorted inverse-transform draws."""
    u = uniform_open(rng, n)
    return np.asarray(model.upper_quantile(u), dtype=float)


def sample(model: TailModel, n: int, seed=0) -> SortedSample:
    """Draw ``n`` observations by inverse transform and return them sorted.

    ``seed`` may be an int, a SeedSequence or a numpy Generator.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return SortedSample.from_values(draw(model, n, make_rng(seed)))


def quantile_grid(model: TailModel, n: int) -> SortedSample:
    """Noise-free sample with X_{n-j+1,n} = Q(1 - j/(n+1)), j = 1..n."""
    j = np.arange(1, n + 1)
    return SortedSample.from_values(model.upper_quantile(j / (n + 1.0)))


# --- model specification strings -------------------------------------------

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        name, num, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name.lower()))
        elif sym is not None and not sym.isspace():
            out.append(("sym", sym))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def fail(self, msg):
        tok = self.toks[self.i][1] if self.i < len(self.toks) else "<end>"
        raise ModelSpecError(f"{msg} at token {tok!r} in model spec {self.text!r}")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def expect(self, kind, value=None):
        k, v = self.peek()
        if k != kind or (value is not None and v != value):
            self.fail(f"expected {value or kind}")
        self.i += 1
        return v

    def kwargs(self):
        out = {}
        while True:
            key = self.expect("name")
            self.expect("sym", "=")
            k, v = self.peek()
            if k != "num":
                self.fail(f"expected a number for {key}")
            self.i += 1
            if key in out:
                self.i -= 3
                self.fail("duplicate parameter")
            out[key] = float(v)
            if self.peek() == ("sym", ","):
                self.i += 1
                continue
            return out

    def model(self):
        kind = self.expect("name")
        if kind not in ("pareto", "burr", "trunc"):
            self.i -= 1
            self.fail("unknown model")
        self.expect("sym", "(")
        if kind == "trunc":
            base = self.model()
            if isinstance(base, TruncatedModel):
                self.fail("nested truncation")
            self.expect("sym", ",")
            start = self.i
            args = self.kwargs()
            if set(args) == {"t"}:
                out = TruncatedModel(base, args["t"])
            elif set(args) == {"tq"}:
                out = TruncatedModel.at_level(base, args["tq"])
            else:
                self.i = start
                self.fail("trunc() takes exactly one of T= or Tq=")
        else:
            start = self.i
            args = self.kwargs()
            try:
                if kind == "pareto" and set(args) in ({"alpha"}, {"alpha", "tau"}):
                    out = ParetoModel(args["alpha"], args.get("tau", 1.0))
                elif kind == "burr" and set(args) == {"alpha", "rho"}:
                    out = BurrModel(args["alpha"], args["rho"])
                else:
                    self.i = start
                    self.fail(f"bad parameters for {kind}")
            except ValueError as exc:
                if isinstance(exc, ModelSpecError):
                    raise
                raise ModelSpecError(f"{exc} in model spec {self.text!r}") from None
        self.expect("sym", ")")
        return out


def parse_model(text: str) -> TailModel:
    """Parse ``pareto(alpha=A[,tau=T0])``, ``burr(alpha=A,rho=R)``,
    ``trunc(<base>,T=<value>)`` or ``trunc(<base>,Tq=<level>)``.
    """
    p = _Parser(text)
    m = p.model()
    if p.i != len(p.toks):
        p.fail("unexpected trailing input")
    return m
