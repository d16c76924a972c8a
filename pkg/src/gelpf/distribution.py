"""Three-parameter generalized exponential (GE) distribution primitives.

The distribution has CDF ``(1 - exp(-(x - gamma)/alpha))**beta`` for
``x > gamma`` and 0 otherwise, with scale ``alpha > 0``, shape ``beta > 0``
and location ``gamma``.  Everything here is a pure function; the sampler
takes an explicit seed or generator so parallel callers control their own
streams.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = ["GEParams", "cdf", "pdf", "quantile", "sample"]

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class GEParams:
    """Parameter triple (scale, shape, location) with positivity checks."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        alpha = float(self.alpha)
        beta = float(self.beta)
        gamma = float(self.gamma)
        if not np.isfinite(alpha) or alpha <= 0.0:
            raise ParameterError(f"scale alpha must be finite and > 0, got {self.alpha}")
        if not np.isfinite(beta) or beta <= 0.0:
            raise ParameterError(f"shape beta must be finite and > 0, got {self.beta}")
        if not np.isfinite(gamma):
            raise ParameterError(f"location gamma must be finite, got {self.gamma}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)


def log1mexp(t):
    """log(1 - exp(-t)) for t > 0, switching forms at log 2 to avoid cancellation."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t <= _LN2
    with np.errstate(divide="ignore"):
        out[small] = np.log(-np.expm1(-t[small]))
        out[~small] = np.log1p(-np.exp(-t[~small]))
    return out


def cdf(x, p: GEParams):
    """CDF of GE(alpha, beta, gamma); 0 at and below the location."""
    x = np.asarray(x, dtype=float)
    t = (x - p.gamma) / p.alpha
    out = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        out[pos] = np.exp(p.beta * log1mexp(t[pos]))
    return out if out.ndim else float(out)


def pdf(x, p: GEParams):
    """Density of GE(alpha, beta, gamma).

    Zero for ``x < gamma``.  At ``x == gamma`` exactly the density is
    unbounded when ``beta < 1``; that point returns ``inf`` (callers that
    integrate never sit on it), ``1/alpha`` when ``beta == 1`` and 0 for
    ``beta > 1``.
    """
    x = np.asarray(x, dtype=float)
    t = (x - p.gamma) / p.alpha
    out = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        tp = t[pos]
        out[pos] = np.exp(np.log(p.beta / p.alpha) - tp + (p.beta - 1.0) * log1mexp(tp))
    at_edge = t == 0
    if np.any(at_edge):
        if p.beta < 1.0:
            out[at_edge] = np.inf
        elif p.beta == 1.0:
            out[at_edge] = 1.0 / p.alpha
    return out if out.ndim else float(out)


def quantile(zeta, p: GEParams):
    """Quantile function: gamma - alpha*log(1 - zeta**(1/beta)).

    ``zeta = 0`` maps to the location parameter; ``zeta = 1`` is a domain
    error (the support is unbounded above).
    """
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < 0.0) or np.any(zeta >= 1.0):
        raise ParameterError("quantile level must lie in [0, 1)")
    out = np.full_like(zeta, p.gamma)
    pos = zeta > 0
    if np.any(pos):
        # log(1 - zeta**(1/beta)) = log(1 - exp(log(zeta)/beta)); the helper
        # picks the cancellation-free branch on both sides
        lz = np.log(zeta[pos]) / p.beta
        out[pos] = p.gamma - p.alpha * log1mexp(-lz)
    return out if out.ndim else float(out)


def sample(p: GEParams, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` i.i.d. values by inverse transform; deterministic given seed."""
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return quantile(u, p)
