"""Tail estimation for Pareto-type data that may be truncated at an unknown high point."""

__version__ = "0.1.0"

from .distributions import (BurrModel, ParetoModel, TruncatedModel, cdf, parse_model, quantile_grid,
                            sample, true_odds, truncation_point, upper_quantile)
from .errors import DatasetError, ModelSpecError, TailError
from .estimators import (alpha_trunc, alpha_trunc_trimmed, d_hat, d_hat_admissible, endpoint_hat,
                         fit_at, fit_path, hill, mom_endpoint, mom_fit, mom_quantile,
                         quantile_light, quantile_trunc, quantile_weissman, ratio_stat, solve_alpha,
                         tau_hat)
from .hypothesis_tests import l_limit_rough, tb_statistic, ta_statistic, test_ta, test_tb
from .ingestion import DatasetSpec, load
from .qq import pareto_qq, select_k_star, tpa_qq, tpa_qq_auto
from .sample import SortedSample

__all__ = [
    "alpha_trunc",
    "alpha_trunc_trimmed",
    "BurrModel",
    "cdf",
    "d_hat",
    "d_hat_admissible",
    "DatasetError",
    "DatasetSpec",
    "endpoint_hat",
    "fit_at",
    "fit_path",
    "hill",
    "l_limit_rough",
    "load",
    "ModelSpecError",
    "mom_endpoint",
    "mom_fit",
    "mom_quantile",
    "pareto_qq",
    "ParetoModel",
    "parse_model",
    "quantile_grid",
    "quantile_light",
    "quantile_trunc",
    "quantile_weissman",
    "ratio_stat",
    "sample",
    "select_k_star",
    "solve_alpha",
    "SortedSample",
    "ta_statistic",
    "TailError",
    "tau_hat",
    "tb_statistic",
    "test_ta",
    "test_tb",
    "tpa_qq",
    "tpa_qq_auto",
    "true_odds",
    "TruncatedModel",
    "truncation_point",
    "upper_quantile",
]
