"""Consistent location-parameter-free estimation for the three-parameter
generalized exponential distribution."""

from .distribution import GEParams, cdf, pdf, quantile, sample
from .likelihood import (
    LogLikValue,
    SortedSample,
    bias_correction_integral,
    loglik,
    loglik_grad,
    scale_balance,
)
from .estimators import (
    FitConfig,
    LpfFit,
    MleFit,
    TailCheck,
    fit_lpf,
    fit_mle,
    min_stat_tail_check,
    quantile_plugin,
)
from .gof import GofReport, cvm_test, ecdf, gof_report, ks_test
from .bootstrap import BootstrapReport, bootstrap_ci
from .simulate import (
    DEFAULT_BETA_CUTOFFS,
    DEFAULT_ZETAS,
    CellResult,
    SimConfig,
    SimReport,
    mc_standard_error,
    run_simulation,
)
from .dataio import SummaryStats, electrical_lifetimes, read_values, summarize
from . import exceptions

__version__ = "0.1.0"

__all__ = [
    "GEParams", "cdf", "pdf", "quantile", "sample",
    "SortedSample", "LogLikValue", "loglik", "loglik_grad",
    "scale_balance", "bias_correction_integral",
    "FitConfig", "LpfFit", "MleFit", "TailCheck",
    "fit_lpf", "fit_mle", "quantile_plugin", "min_stat_tail_check",
    "GofReport", "ecdf", "ks_test", "cvm_test", "gof_report",
    "BootstrapReport", "bootstrap_ci",
    "SimConfig", "SimReport", "CellResult", "run_simulation",
    "mc_standard_error", "DEFAULT_BETA_CUTOFFS", "DEFAULT_ZETAS",
    "SummaryStats", "electrical_lifetimes", "read_values", "summarize",
    "exceptions",
]
