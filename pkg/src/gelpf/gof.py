"""Goodness-of-fit statistics for a fitted GE model.

Kolmogorov-Smirnov and Cramer-von Mises statistics are computed from the
probability integral transform of the ordered sample.  P-values come from
the classical large-sample null distributions with the parameters treated
as known; that convention (no estimated-parameter correction) is what the
reported reference values use, and it is stated in the output.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, kv

from .distribution import GEParams, cdf
from .likelihood import SortedSample

__all__ = ["GofReport", "EmpiricalCdf", "ecdf", "ks_test", "cvm_test", "gof_report"]

_SERIES_TOL = 1e-12


@dataclass(frozen=True)
class GofReport:
    ks_stat: float
    ks_pvalue: float
    cvm_stat: float
    cvm_pvalue: float
    convention: str = "asymptotic null, parameters treated as known"


class EmpiricalCdf:
    """Right-continuous step function with jumps 1/n at each observation."""

    def __init__(self, xs: np.ndarray):
        self.xs = np.asarray(xs, dtype=float)
        self.n = len(self.xs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.xs, x, side="right") / self.n
        return out if out.ndim else float(out)


def ecdf(sample: SortedSample) -> EmpiricalCdf:
    return EmpiricalCdf(sample.xs)


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution,
    ``2 sum (-1)^(k-1) exp(-2 k^2 lam^2)``, truncated at 1e-12 terms."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 200):
        term = np.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 == 1 else -term
        if term < _SERIES_TOL:
            break
    return float(min(1.0, max(0.0, 2.0 * total)))


def cvm_limit_cdf(x: float) -> float:
    """Limiting CDF of the Cramer-von Mises statistic (Bessel-K series with
    positive coefficients Gamma(j+1/2)/(Gamma(1/2) j!)), truncated when terms
    fall below 1e-12."""
    if x <= 0.0:
        return 0.0
    total = 0.0
    for j in range(200):
        a = (4.0 * j + 1.0) ** 2 / (16.0 * x)
        if a > 700.0:
            break
        coef = np.exp(gammaln(j + 0.5) - gammaln(0.5) - gammaln(j + 1.0))
        term = coef * np.sqrt(4.0 * j + 1.0) * np.exp(-a) * kv(0.25, a)
        total += term
        if abs(term) < _SERIES_TOL and j > 2:
            break
    val = total / (np.pi * np.sqrt(x))
    return float(min(1.0, max(0.0, val)))


def ks_test(sample: SortedSample, params: GEParams):
    """Kolmogorov-Smirnov distance of the sample to the model CDF and its
    asymptotic p-value from ``sqrt(n) * D``."""
    n = sample.n
    f = cdf(sample.xs, params)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    stat = float(max(d_plus, d_minus))
    pvalue = kolmogorov_sf(np.sqrt(n) * stat)
    return stat, pvalue


def cvm_test(sample: SortedSample, params: GEParams):
    """Cramer-von Mises statistic ``1/(12n) + sum (F_i - (2i-1)/(2n))^2`` and
    its p-value from the limiting distribution."""
    n = sample.n
    f = cdf(sample.xs, params)
    i = np.arange(1, n + 1)
    stat = float(1.0 / (12.0 * n) + np.sum((f - (2.0 * i - 1.0) / (2.0 * n)) ** 2))
    pvalue = 1.0 - cvm_limit_cdf(stat)
    return stat, pvalue


def gof_report(sample: SortedSample, params: GEParams) -> GofReport:
    ks_stat, ks_p = ks_test(sample, params)
    cvm_stat, cvm_p = cvm_test(sample, params)
    return GofReport(ks_stat=ks_stat, ks_pvalue=ks_p,
                     cvm_stat=cvm_stat, cvm_pvalue=cvm_p)
