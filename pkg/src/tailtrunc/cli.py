"""Command-line front end.

Subcommands ``fit``, ``test``, ``qq``, ``quantile``, ``endpoint`` read an
observation file; ``simulate`` runs the Monte Carlo engine. Tables are
written in long format as CSV (default) or JSON.

Exit codes: 0 success (per-k failures are flagged in a ``status`` column),
2 usage or input error, 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from ._format import format_number, json_value
from .errors import DatasetError, ModelSpecError, TailError
from .estimators import fit_at
from .hypothesis_tests import ta_outcome, ta_statistic, tb_outcome, tb_statistic
from .ingestion import DatasetSpec, load
from .montecarlo import (load_config, parse_config_text, parse_k_grid, replicate_paper_grid,
                         run_simulation, summaries_to_csv, summaries_to_json)
from .qq import candidate_odds, pareto_qq, select_k_star, tpa_qq

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 2, 3

FIT_COLUMNS = ("k", "H", "inv_H", "alpha_trunc", "d_raw", "d_admissible", "tau_hat", "q_trunc",
               "q_weissman", "q_mom", "xi_mom", "endpoint_trunc", "endpoint_mom", "status")
TEST_COLUMNS = ("k", "ta_stat", "ta_p", "tb_stat", "tb_p", "ta_reject", "tb_reject", "status")
QUANTILE_COLUMNS = ("k", "p", "q_trunc", "q_light", "q_weissman", "q_mom", "status")
ENDPOINT_COLUMNS = ("k", "endpoint_trunc", "endpoint_mom", "status")


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _prob(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return v


def _shared(p: argparse.ArgumentParser, data: bool = True, seed_default=0) -> None:
    if data:
        p.add_argument("--input", "-i", required=True, help="observation file")
        p.add_argument("--column", help="CSV column name or 0-based index")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--min-threshold", type=float, help="drop values below this")
        p.add_argument("--k", default=None,
                       help="k, or a range a:b[:step] (inclusive); default 1..n-1")
    p.add_argument("--seed", type=_u64, default=seed_default)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailtrunc",
                                     description="Tail fitting for truncated and untruncated Pareto-type data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="per-k index, odds, quantile and endpoint table")
    _shared(p)
    p.add_argument("--p", type=_prob, help="tail probability for the quantile columns")
    p.add_argument("--d-raw", action="store_true", help="use the raw odds estimate instead of max(d, 0)")

    p = sub.add_parser("test", help="truncation tests TA and TB per k")
    _shared(p)
    p.add_argument("--level", type=_prob, default=0.05)

    p = sub.add_parser("qq", help="Pareto or truncated-Pareto QQ-plot data")
    _shared(p)
    p.add_argument("--kind", choices=("pareto", "tpa"), default="pareto")
    p.add_argument("--k-min", type=int, default=11, help="smallest candidate anchor (tpa)")
    p.add_argument("--k-star", type=int, help="fix the anchor instead of selecting it (tpa)")
    p.add_argument("--d", type=float, help="fix the odds value (tpa)")
    p.add_argument("--stride", type=int, default=1, help="candidate stride for anchor search")
    p.add_argument("--d-raw", action="store_true")

    p = sub.add_parser("quantile", help="extreme quantile estimates per k")
    _shared(p)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--d-raw", action="store_true")

    p = sub.add_parser("endpoint", help="endpoint estimates per k")
    _shared(p)
    p.add_argument("--d-raw", action="store_true")

    p = sub.add_parser("simulate", help="Monte Carlo runs")
    # unset seed lets a config file supply its own
    _shared(p, data=False, seed_default=None)
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--model", help="model spec, e.g. trunc(pareto(alpha=2),Tq=0.9)")
    p.add_argument("--n", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--k-grid", help="a:b[:step] or comma list")
    p.add_argument("--p", type=_prob)
    p.add_argument("--estimators", help="comma list of estimators")
    p.add_argument("--d-raw", action="store_true")
    p.add_argument("--paper-grid", action="store_true", help="run the 3 x 3 model grid")
    p.add_argument("--workers", type=int, default=1)
    return parser


# --- helpers ----------------------------------------------------------------

def _load(args):
    col = args.column
    if col is not None and col.lstrip("-").isdigit():
        col = int(col)
    return load(DatasetSpec(args.input, col, args.delimiter, args.min_threshold))


def _k_values(args, n: int) -> List[int]:
    if args.k is None:
        ks = list(range(1, n))
    else:
        try:
            ks = list(parse_k_grid(args.k))
        except ValueError as exc:
            raise UsageError(f"bad --k {args.k!r}: {exc}") from None
    bad = [k for k in ks if not 1 <= k <= n - 1]
    if not ks or bad:
        raise UsageError(f"--k must lie within 1..{n - 1}")
    return ks


def _table(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: json_value(r.get(c)) for c in columns} for r in rows],
                          indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_number(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _status(parts) -> str:
    return ";".join(parts) if parts else "ok"


# --- commands ---------------------------------------------------------------

def cmd_fit(args) -> int:
    s = _load(args)
    rows = []
    for k in _k_values(args, s.n):
        f = fit_at(s, k, args.p, use_raw_d=args.d_raw)
        rows.append({"k": k, "H": f.hill, "inv_H": 1.0 / f.hill if f.hill > 0 else math.nan,
                     "alpha_trunc": f.alpha_trunc, "d_raw": f.d_raw, "d_admissible": f.d_admissible,
                     "tau_hat": f.tau_hat, "q_trunc": f.q_trunc, "q_weissman": f.q_weissman,
                     "q_mom": f.q_mom, "xi_mom": f.mom.xi_mom if f.mom else math.nan,
                     "endpoint_trunc": f.endpoint, "endpoint_mom": f.endpoint_mom,
                     "status": _status(f.status)})
    _emit(_table(rows, FIT_COLUMNS, args.format), args)
    return EXIT_OK


def cmd_test(args) -> int:
    s = _load(args)
    rows = []
    for k in _k_values(args, s.n):
        row, status = {"k": k}, []
        try:
            ta = ta_outcome(ta_statistic(s, k), args.level)
            row.update(ta_stat=ta.statistic, ta_p=ta.p_value, ta_reject=ta.reject)
        except TailError as exc:
            status.append("ta:" + type(exc).__name__)
        try:
            tb = tb_outcome(tb_statistic(s, k), args.level)
            row.update(tb_stat=tb.statistic, tb_p=tb.p_value, tb_reject=tb.reject)
        except TailError as exc:
            status.append("tb:" + type(exc).__name__)
        row["status"] = _status(status)
        rows.append(row)
    _emit(_table(rows, TEST_COLUMNS, args.format), args)
    return EXIT_OK


def cmd_qq(args) -> int:
    s = _load(args)
    if args.kind == "pareto":
        plot = pareto_qq(s)
    elif args.d is not None:
        if args.d < 0:
            raise UsageError("--d must be nonnegative")
        plot = tpa_qq(s, args.d, args.k_star)
    elif args.k_star is not None:
        if not 1 <= args.k_star <= s.n - 1:
            raise UsageError(f"--k-star must lie within 1..{s.n - 1}")
        f = fit_at(s, args.k_star, use_raw_d=args.d_raw, mom=False)
        if f.status:
            raise UsageError(f"cannot estimate the odds at k*={args.k_star}: {_status(f.status)}")
        d = max(f.d_raw, 0.0)
        plot = tpa_qq(s, d, args.k_star)
    else:
        if not (args.k_min >= 2 and s.n > args.k_min):
            raise UsageError(f"need n > k-min >= 2 (n={s.n})")
        k, c = select_k_star(s, args.k_min, args.stride)
        d = float(candidate_odds(s, [k])[0])
        plot = tpa_qq(s, d, k)
    if args.format == "json":
        text = json.dumps({"kind": plot.kind, "k_star": plot.k_star, "d_used": json_value(plot.d_used),
                           "correlation": json_value(plot.correlation),
                           "points": [[json_value(a), json_value(b)] for a, b in plot.points]},
                          indent=1, allow_nan=False) + "\n"
    else:
        text = plot.to_csv()
    _emit(text, args)
    return EXIT_OK


def cmd_quantile(args) -> int:
    s = _load(args)
    rows = []
    for k in _k_values(args, s.n):
        f = fit_at(s, k, args.p, use_raw_d=args.d_raw)
        rows.append({"k": k, "p": args.p, "q_trunc": f.q_trunc, "q_light": f.q_light,
                     "q_weissman": f.q_weissman, "q_mom": f.q_mom, "status": _status(f.status)})
    _emit(_table(rows, QUANTILE_COLUMNS, args.format), args)
    return EXIT_OK


def cmd_endpoint(args) -> int:
    s = _load(args)
    rows = []
    for k in _k_values(args, s.n):
        f = fit_at(s, k, use_raw_d=args.d_raw)
        rows.append({"k": k, "endpoint_trunc": f.endpoint, "endpoint_mom": f.endpoint_mom,
                     "status": _status(f.status)})
    _emit(_table(rows, ENDPOINT_COLUMNS, args.format), args)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if args.paper_grid:
        kw = {"base_seed": args.seed or 0, "workers": args.workers, "use_raw_d": args.d_raw}
        if args.runs is not None:
            kw["runs"] = args.runs
        if args.n is not None:
            kw["n"] = args.n
        if args.p is not None:
            kw["p_target"] = args.p
        if args.k_grid is not None:
            kw["k_grid"] = parse_k_grid(args.k_grid)
        summaries = replicate_paper_grid(**kw)
    else:
        overrides = {"model": args.model, "n": args.n, "runs": args.runs, "k_grid": args.k_grid,
                     "p": args.p, "estimators": args.estimators,
                     "d_raw": "true" if args.d_raw else None}
        overrides["seed"] = args.seed
        if args.config:
            config = load_config(args.config, overrides)
        else:
            if not args.model:
                raise UsageError("simulate needs --config, --model or --paper-grid")
            config = parse_config_text("", overrides)
        summaries = [run_simulation(config, args.workers)]
    text = summaries_to_json(summaries) if args.format == "json" else summaries_to_csv(summaries)
    _emit(text, args)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "test": cmd_test, "qq": cmd_qq, "quantile": cmd_quantile,
            "endpoint": cmd_endpoint, "simulate": cmd_simulate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DatasetError, ModelSpecError, ValueError, OSError) as exc:
        print(f"tailtrunc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"tailtrunc {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
