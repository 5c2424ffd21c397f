"""Seedable Monte Carlo engine for per-k estimator and test curves.

Replication ``r`` of a configuration draws its sample from the stream keyed
by ``(seed, r)``, so results do not depend on how replications are spread
over worker processes. Aggregates are computed from the full
``runs x len(k_grid)`` array in replication order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import ndtr

from .distributions import (BurrModel, ParetoModel, TailModel, TruncatedModel, draw,
                            parse_model, truncation_point, upper_quantile)
from ._format import format_number, json_value
from .estimators import DEFAULT_TOL, solve_alpha_array
from .rng import derive_seed, make_rng

ESTIMATORS = ("alpha_trunc", "hill_inverse", "mom", "q_trunc", "q_weissman", "q_mom",
              "endpoint_trunc", "endpoint_mom", "test_ta", "test_tb")
TESTS = ("test_ta", "test_tb")
CSV_COLUMNS = ("model", "T_spec", "estimator", "k", "mean", "rmse", "mean_p", "failures")


def default_k_grid(n: int) -> Tuple[int, ...]:
    """Every 5th k from 10 to n - 10."""
    return tuple(range(10, n - 10 + 1, 5))


@dataclass(frozen=True)
class SimConfig:
    model: TailModel
    n: int = 400
    runs: int = 200
    k_grid: Optional[Tuple[int, ...]] = None
    p_target: float = 0.002
    seed: int = 0
    estimators: Tuple[str, ...] = ESTIMATORS
    use_raw_d: bool = False

    def __post_init__(self):
        if isinstance(self.model, str):
            object.__setattr__(self, "model", parse_model(self.model))
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.k_grid is None:
            object.__setattr__(self, "k_grid", default_k_grid(self.n))
        ks = tuple(int(k) for k in self.k_grid)
        if not ks:
            raise ValueError("k_grid is empty")
        bad = [k for k in ks if not 1 <= k <= self.n - 1]
        if bad:
            raise ValueError(f"k values outside 1..{self.n - 1}: {bad[:5]}")
        object.__setattr__(self, "k_grid", ks)
        if not 0 < self.p_target < 1:
            raise ValueError("p_target must lie in (0, 1)")
        est = tuple(self.estimators)
        unknown = [e for e in est if e not in ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown estimators: {unknown}")
        object.__setattr__(self, "estimators", est)
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def model_labels(model: TailModel) -> Tuple[str, str]:
    """(parent model spec, truncation spec) as used in the CSV columns."""
    if isinstance(model, TruncatedModel):
        return model.base.spec, model.T_spec
    return model.spec, "inf"


def truths(config: SimConfig) -> Dict[str, float]:
    m = config.model
    alpha = m.tail_index
    q = upper_quantile(m, config.p_target)
    T = truncation_point(m)
    return {"alpha_trunc": alpha, "hill_inverse": alpha, "mom": 1.0 / alpha,
            "q_trunc": q, "q_weissman": q, "q_mom": q,
            "endpoint_trunc": T, "endpoint_mom": T,
            "test_ta": math.nan, "test_tb": math.nan}


def evaluate(values: np.ndarray, ks: Sequence[int], p: float, use_raw_d: bool = False,
             tol: float = DEFAULT_TOL) -> Dict[str, np.ndarray]:
    """Every estimator and test at every ``k`` on one sorted sample.

    Returns arrays aligned with ``ks``; failed estimates are ``nan`` and an
    undetected endpoint is ``inf``. Test entries hold statistics and the
    matching ``*_p`` keys hold p-values.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    ks = np.asarray(ks, dtype=int)
    logs = np.log(x)
    top = logs[::-1][: ks.max()]
    lthr = logs[n - ks - 1]
    lmax = logs[-1]
    mask = np.arange(top.size)[None, :] < ks[:, None]
    excess = np.where(mask, top[None, :] - lthr[:, None], 0.0)
    kf = ks.astype(float)
    h = excess.sum(axis=1) / kf
    m2 = (excess * excess).sum(axis=1) / kf
    logr = lthr - lmax
    out: Dict[str, np.ndarray] = {}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        alpha, _ = solve_alpha_array(h, logr, tol)
        out["alpha_trunc"] = alpha
        out["hill_inverse"] = np.where(h > 0, 1.0 / h, np.nan)

        dev = np.where(mask, excess - h[:, None], 0.0)
        frac = (dev * dev).sum(axis=1) / kf / m2
        xi_minus = np.where((m2 > 0) & (frac > 0), 1.0 - 0.5 / frac, np.nan)
        xi = h + xi_minus
        out["mom"] = xi

        pk = (kf + 1.0) / (n + 1.0)
        ra = np.exp(alpha * logr)
        d_raw = pk * (ra - 1.0 / (kf + 1.0)) / (1.0 - ra)
        d = d_raw if use_raw_d else np.maximum(d_raw, 0.0)
        qt = np.exp(lthr + np.log((d + pk) / (d + p)) / alpha)
        out["q_trunc"] = np.where(d + p > 0, qt, np.nan)
        out["q_weissman"] = np.exp(lthr + h * np.log(pk / p))

        scale = np.exp(lthr) * h * (1.0 - xi_minus)
        lf = np.log(kf / (n * p))
        growth = np.where(xi == 0, lf, np.expm1(xi * lf) / np.where(xi == 0, 1.0, xi))
        out["q_mom"] = np.exp(lthr) + scale * growth

        xmax = x[-1]
        end_raw = np.exp(lthr + np.log((d + pk) / d) / alpha)
        out["endpoint_trunc"] = np.where(np.isnan(alpha), np.nan,
                                         np.where(d > 0, np.maximum(end_raw, xmax), np.inf))
        end_m = np.exp(lthr) - scale / xi
        out["endpoint_mom"] = np.where(np.isnan(xi), np.nan,
                                       np.where(xi < 0, np.maximum(end_m, xmax), np.inf))

        ta = np.where((h > 0) & (logr < 0), kf * np.exp(logr / h), np.nan)
        out["test_ta"] = ta
        out["test_ta_p"] = np.exp(-ta)

        e = np.where(mask, np.exp(-excess / h[:, None]), 0.0).sum(axis=1) / kf
        tb = np.where((h > 0) & (e < 1), np.sqrt(12.0 * kf) * (e - 0.5) / (1.0 - e), np.nan)
        out["test_tb"] = tb
        out["test_tb_p"] = ndtr(tb)
    return out


def _replication(args):
    config, r = args
    rng = make_rng(config.seed, r)
    x = np.sort(draw(config.model, config.n, rng))
    return evaluate(x, config.k_grid, config.p_target, config.use_raw_d)


@dataclass
class SimSummary:
    """Per-estimator, per-k aggregates of one configuration.

    ``stats[name]`` maps to a dict of arrays ``mean``, ``rmse``, ``mean_p``
    and ``failures``, each aligned with ``k_grid``. A failure is any
    replication whose estimate is unavailable: a failed index solve,
    degenerate moments, or an infinite endpoint (no finite endpoint found).
    """

    model: str
    T_spec: str
    n: int
    runs: int
    seed: int
    p_target: float
    k_grid: Tuple[int, ...]
    truths: Dict[str, float]
    stats: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)

    def curve(self, estimator: str, what: str = "mean") -> np.ndarray:
        return self.stats[estimator][what]

    def at(self, estimator: str, k: int, what: str = "mean") -> float:
        return float(self.stats[estimator][what][self.k_grid.index(k)])

    def rows(self) -> List[dict]:
        out = []
        for name, st in self.stats.items():
            for i, k in enumerate(self.k_grid):
                out.append({"model": self.model, "T_spec": self.T_spec, "estimator": name,
                            "k": k, "mean": float(st["mean"][i]), "rmse": float(st["rmse"][i]),
                            "mean_p": float(st["mean_p"][i]), "failures": int(st["failures"][i])})
        return out

    def to_dict(self) -> dict:
        return {"model": self.model, "T_spec": self.T_spec, "n": self.n, "runs": self.runs,
                "seed": self.seed, "p_target": self.p_target, "k_grid": list(self.k_grid),
                "truths": {k: json_value(v) for k, v in self.truths.items()},
                "rows": [{k: json_value(v) for k, v in row.items()} for row in self.rows()]}


def summaries_to_csv(summaries: Sequence[SimSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in summaries:
        for row in s.rows():
            w.writerow([row[c] if c in ("model", "T_spec", "estimator") else format_number(row[c])
                        for c in CSV_COLUMNS])
    return buf.getvalue()


def summaries_to_json(summaries: Sequence[SimSummary]) -> str:
    return json.dumps([s.to_dict() for s in summaries], indent=1, allow_nan=False) + "\n"


def _aggregate(name, block, truth, p_block=None):
    finite = np.isfinite(block)
    count = finite.sum(axis=0)
    runs = block.shape[0]
    safe = np.where(finite, block, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, safe.sum(axis=0) / count, np.nan)
        if math.isfinite(truth):
            sq = np.where(finite, (block - truth) ** 2, 0.0)
            rmse = np.where(count > 0, np.sqrt(sq.sum(axis=0) / count), np.nan)
        else:
            rmse = np.full(block.shape[1], np.nan)
        if p_block is not None:
            pf = np.isfinite(p_block)
            mean_p = np.where(pf.sum(axis=0) > 0,
                              np.where(pf, p_block, 0.0).sum(axis=0) / pf.sum(axis=0), np.nan)
        else:
            mean_p = np.full(block.shape[1], np.nan)
    return {"mean": mean, "rmse": rmse, "mean_p": mean_p, "failures": runs - count}


def run_replications(config: SimConfig, workers: int = 1) -> List[Dict[str, np.ndarray]]:
    """Per-replication evaluation results, in replication order."""
    jobs = [(config, r) for r in range(config.runs)]
    if workers <= 1 or config.runs == 1:
        return [_replication(j) for j in jobs]
    chunk = max(1, config.runs // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_replication, jobs, chunksize=chunk))


def run_simulation(config: SimConfig, workers: int = 1) -> SimSummary:
    """Run ``config.runs`` replications and aggregate per estimator and k.

    Output is identical for any ``workers`` value.
    """
    reps = run_replications(config, workers)
    tr = truths(config)
    model, T_spec = model_labels(config.model)
    summary = SimSummary(model, T_spec, config.n, config.runs, int(config.seed),
                         config.p_target, config.k_grid, tr)
    for name in config.estimators:
        block = np.stack([rep[name] for rep in reps])
        p_block = np.stack([rep[name + "_p"] for rep in reps]) if name in TESTS else None
        summary.stats[name] = _aggregate(name, block, tr[name], p_block)
    return summary


# --- the 3 x 3 study design ---------------------------------------------------

GRID_PARENTS = (ParetoModel(0.5), ParetoModel(2.0), BurrModel(2.0, -1.0))
GRID_LEVELS = (0.90, 0.99, None)


def grid_models() -> List[TailModel]:
    out = []
    for base in GRID_PARENTS:
        for level in GRID_LEVELS:
            out.append(base if level is None else TruncatedModel.at_level(base, level))
    return out


def grid_configs(base_seed: int = 0, runs: int = 200, n: int = 400, p_target: float = 0.002,
                       k_grid=None, use_raw_d: bool = False) -> List[SimConfig]:
    return [SimConfig(m, n=n, runs=runs, k_grid=k_grid, p_target=p_target,
                      seed=derive_seed(base_seed, i), use_raw_d=use_raw_d)
            for i, m in enumerate(grid_models())]


def replicate_paper_grid(base_seed: int = 0, runs: int = 200, n: int = 400,
                         p_target: float = 0.002, k_grid=None, workers: int = 1,
                         use_raw_d: bool = False) -> List[SimSummary]:
    """{Pa(0.5), Pa(2), Burr(2,-1)} x {T = Q_W(0.90), Q_W(0.99), inf}.

    Cells are ordered parent-major; each cell gets its own seed derived from
    ``base_seed`` and the cell index.
    """
    return [run_simulation(c, workers) for c in
            grid_configs(base_seed, runs, n, p_target, k_grid, use_raw_d)]


# --- config files ------------------------------------------------------------

CONFIG_KEYS = ("model", "n", "runs", "k_grid", "p", "seed", "estimators", "d_raw")


def parse_k_grid(text: str) -> Tuple[int, ...]:
    """``"a:b"`` or ``"a:b:step"`` (inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(f"bad k range {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        if step < 1:
            raise ValueError(f"bad k step in {text!r}")
        return tuple(range(parts[0], parts[1] + 1, step))
    return tuple(int(p) for p in text.split(",") if p.strip())


def _truthy(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config_text(text: str, overrides: Optional[dict] = None) -> SimConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment.

    Keys: model, n, runs, k_grid, p, seed, estimators (comma list), d_raw.
    """
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        raw[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = str(value)
    if "model" not in raw:
        raise ValueError("config needs a model")
    kw = {"model": parse_model(raw["model"])}
    if "n" in raw:
        kw["n"] = int(raw["n"])
    if "runs" in raw:
        kw["runs"] = int(raw["runs"])
    if "k_grid" in raw:
        kw["k_grid"] = parse_k_grid(raw["k_grid"])
    if "p" in raw:
        kw["p_target"] = float(raw["p"])
    if "seed" in raw:
        kw["seed"] = int(raw["seed"])
    if "estimators" in raw:
        kw["estimators"] = tuple(e.strip() for e in raw["estimators"].split(",") if e.strip())
    if "d_raw" in raw:
        kw["use_raw_d"] = _truthy(raw["d_raw"])
    return SimConfig(**kw)


def load_config(path: Union[str, Path], overrides: Optional[dict] = None) -> SimConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), overrides)
