"""Location-free likelihood of the GE scale and shape parameters.

Subtracting the sample minimum removes the location parameter: the spacings
``v_i = x_(i) - x_(1)`` have a joint density that depends on (alpha, beta)
only, obtained by integrating the minimum out over a latent offset
``u > 0``.  This module evaluates the log of that integral likelihood, its
gradient, and the first-order-statistic bias integral used to correct the
location estimate.

Numerics: with ``u = alpha * t`` and ``z = 1 - exp(-t)`` the integral
becomes a finite-interval one,

    integral over (0, 1) of  z**(beta-1) * (1-z)**(n-1)
        * prod_{i>=2} (1 - (1-z) e**(-v_i/alpha))**(beta-1)  dz,

which is scale-free, needs no tail truncation, and concentrates near
``z ~ beta/n``.  For ``beta < 2`` the additional substitution
``z = x**(2/beta)`` turns ``z**(beta-1) dz`` into ``(2/beta) x dx``, so the
integrand handed to the quadrature vanishes linearly at the origin and no
endpoint singularity survives for any ``beta > 0``.  The integrand is
evaluated in the log domain and the peak value is factored out before
exponentiation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import DataError, ParameterError, TiesError
from .quadrature import dyadic_breakpoints, integrate_panels

__all__ = [
    "SortedSample",
    "LogLikValue",
    "loglik",
    "loglik_grad",
    "scale_balance",
    "bias_correction_integral",
]


@dataclass(frozen=True)
class SortedSample:
    """Validated ascending sample with cached spacings ``vs = xs - xs[0]``."""

    xs: np.ndarray
    vs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xs)

    @classmethod
    def from_data(cls, values, ties: str = "error", rng=None) -> "SortedSample":
        """Build from raw observations.

        ``ties="error"`` rejects exact ties; ``ties="jitter"`` perturbs every
        value by a uniform half-step of the data's decimal resolution (an
        opt-in, reproducible only through ``rng``).
        """
        xs = np.sort(np.asarray(values, dtype=float))
        if xs.ndim != 1 or len(xs) < 3:
            raise DataError(f"need at least 3 observations, got {xs.size}")
        if not np.all(np.isfinite(xs)):
            raise DataError("observations must all be finite")
        if np.any(np.diff(xs) == 0.0):
            if ties != "jitter":
                raise TiesError(
                    "sample contains exact ties; pass ties='jitter' to break them"
                )
            rng = np.random.default_rng(rng)
            res = _decimal_resolution(xs)
            xs = np.sort(xs + rng.uniform(-0.5 * res, 0.5 * res, size=len(xs)))
            if np.any(np.diff(xs) == 0.0):
                raise TiesError("ties survived jittering; data look degenerate")
        return cls(xs=xs, vs=xs - xs[0])


def _decimal_resolution(xs: np.ndarray) -> float:
    """Smallest power of ten that represents every value as an integer multiple."""
    for k in range(0, 13):
        res = 10.0 ** -k
        scaled = xs / res
        if np.allclose(scaled, np.round(scaled), rtol=0.0, atol=1e-6):
            return res
    return 10.0 ** -12


@dataclass(frozen=True)
class LogLikValue:
    """Log of the integral likelihood plus the achieved quadrature error."""

    log_value: float
    quadrature_error: float


def _check_params(alpha: float, beta: float) -> None:
    if not np.isfinite(alpha) or alpha <= 0.0:
        raise ParameterError(f"alpha must be finite and > 0, got {alpha}")
    if not np.isfinite(beta) or beta <= 0.0:
        raise ParameterError(f"beta must be finite and > 0, got {beta}")


# The quadrature runs in z-space for beta >= 2, where the z**(beta-1) factor
# is at least C^1 at the origin.  For beta < 2 the substitution z = x**(2/beta)
# turns z**(beta-1) dz into (2/beta) x dx exactly, so the integrand vanishes
# linearly at 0 and no endpoint singularity survives for any beta > 0.
_Z_SPACE_MIN_BETA = 2.0


def _seed_breakpoints(n: int, beta: float) -> np.ndarray:
    n = max(n, 4)
    if beta >= _Z_SPACE_MIN_BETA:
        depth = int(np.ceil(np.log2(n))) + 4
        upper = 4 + max(0, int(np.ceil(np.log2(beta))))
    else:
        # mass sits near x ~ (beta/n)**(beta/2)
        depth = int(np.ceil(0.5 * beta * np.log2(n))) + 6
        upper = 6
    return dyadic_breakpoints(depth, upper)


class _SpacingIntegrand:
    """Shared state for the likelihood integrand and its gradient rows.

    Works in z-space for ``beta >= 2`` and in ``x = z**(beta/2)`` space
    otherwise; in both cases the quadrature variable runs over (0, 1).
    """

    def __init__(self, alpha: float, beta: float, vs: np.ndarray, need_grad: bool):
        self.alpha = alpha
        self.beta = beta
        self.n = len(vs)
        self.need_grad = need_grad
        self.w = vs / alpha
        self.emw = np.exp(-self.w)              # e^{-w_i}; first entry is 1
        self.pm = -np.expm1(-self.w)            # 1 - e^{-w_i}; first entry is 0
        self.offset = 0.0                       # filled by prime()

    def _pieces(self, x: np.ndarray):
        """z, log z, tail spacing terms p_i and log p_i for i >= 2."""
        if self.beta >= _Z_SPACE_MIN_BETA:
            z = x
            ln_z = np.log(x)
        else:
            ln_z = np.log(x) * (2.0 / self.beta)
            z = np.exp(ln_z)
        p_tail = self.pm[None, 1:] + z[:, None] * self.emw[None, 1:]
        lp_tail = np.log(p_tail)
        return z, ln_z, p_tail, lp_tail

    def _logf(self, x, z, ln_z, lp_tail):
        out = (self.n - 1) * np.log1p(-z) + (self.beta - 1.0) * lp_tail.sum(axis=1)
        if self.beta >= _Z_SPACE_MIN_BETA:
            out += (self.beta - 1.0) * ln_z
        else:
            out += np.log(x)
        return out

    def prime(self) -> np.ndarray:
        """Choose seed panels and the log-scale offset; return breakpoints."""
        breaks = _seed_breakpoints(self.n, self.beta)
        probe = np.unique(np.concatenate([
            0.5 * (breaks[:-1] + breaks[1:]),
            breaks[1:-1],
        ]))
        z, ln_z, _, lp_tail = self._pieces(probe)
        self.offset = float(np.max(self._logf(probe, z, ln_z, lp_tail)))
        return breaks

    def __call__(self, x: np.ndarray) -> np.ndarray:
        z, ln_z, p_tail, lp_tail = self._pieces(x)
        f0 = np.exp(self._logf(x, z, ln_z, lp_tail) - self.offset)
        if not self.need_grad:
            return f0[None, :]
        out = np.zeros((3, len(x)))
        out[0] = f0
        # Gradient brackets (partial derivatives of the log-integrand of the
        # latent-offset representation at u(z)) are only needed where the
        # integrand itself is nonzero; elsewhere 0 * bracket would be 0 but
        # could hit inf * 0 artifacts when z under- or overflows.
        act = np.nonzero(f0 > 0.0)[0]
        if len(act):
            za = z[act]
            t = -np.log1p(-za)
            b_beta = self.n / self.beta + ln_z[act] + lp_tail[act].sum(axis=1)
            coef = 1.0 - self.beta
            pa = p_tail[act]
            s_tail = t[:, None] + self.w[None, 1:]
            sum_tail = (s_tail * (1.0 + coef * (1.0 - pa) / pa)).sum(axis=1)
            # first spacing is zero: its term is t*(1-z)/z, series-expanded
            # when z underflows the direct quotient
            tz = np.empty_like(za)
            small = za <= 1e-4
            tz[~small] = t[~small] * (1.0 - za[~small]) / za[~small]
            zs = za[small]
            tz[small] = 1.0 - 0.5 * zs - zs * zs / 6.0
            b_alpha = (-self.n + t + coef * tz + sum_tail) / self.alpha
            out[1, act] = f0[act] * b_alpha
            out[2, act] = f0[act] * b_beta
        return out


def _evaluate(alpha, beta, sample, need_grad, rel_tol, grad_rel_tol, max_panels):
    _check_params(alpha, beta)
    n = sample.n
    integrand = _SpacingIntegrand(alpha, beta, sample.vs, need_grad)
    breaks = integrand.prime()
    rtol = np.array([rel_tol, grad_rel_tol, grad_rel_tol]) if need_grad else rel_tol
    vals, errs, _ = integrate_panels(
        integrand, breaks, rtol, scale_to_first=need_grad, max_panels=max_panels
    )
    log_j = integrand.offset + np.log(vals[0])
    if beta < _Z_SPACE_MIN_BETA:
        log_j += np.log(2.0 / beta)
    log_value = (
        gammaln(n + 1)
        + n * (np.log(beta) - np.log(alpha))
        + np.log(alpha)
        - integrand.w.sum()
        + log_j
    )
    rel_err = float(errs[0] / vals[0])
    if not need_grad:
        return log_value, None, rel_err
    grad = np.array([vals[1] / vals[0], vals[2] / vals[0]])
    return log_value, grad, rel_err


def loglik(alpha, beta, sample: SortedSample, *, rel_tol=1e-10, max_panels=2048) -> LogLikValue:
    """Log of the integral likelihood of (alpha, beta) given the spacings."""
    value, _, err = _evaluate(alpha, beta, sample, False, rel_tol, rel_tol, max_panels)
    return LogLikValue(log_value=float(value), quadrature_error=err)


def loglik_grad(alpha, beta, sample: SortedSample, *, rel_tol=1e-10,
                grad_rel_tol=1e-8, max_panels=2048):
    """Log-likelihood and its gradient ``(d/dalpha, d/dbeta)``.

    Both integrals are evaluated on the same panel set as the likelihood so
    the ratio forming the gradient is internally consistent.
    """
    value, grad, err = _evaluate(alpha, beta, sample, True, rel_tol, grad_rel_tol, max_panels)
    return LogLikValue(log_value=float(value), quadrature_error=err), grad


def scale_balance(alpha, beta, u, sample: SortedSample):
    """Weighted mean of the shifted spacings whose crossing with ``alpha``
    marks the stationary point of the log-integrand along the scale axis.

    Equals ``mean(c_i)`` independently of ``alpha`` at ``beta = 1``; strictly
    decreasing in ``alpha`` for ``beta > 1`` and strictly increasing with
    slope below one for ``beta < 1``.
    """
    _check_params(alpha, beta)
    if u <= 0:
        raise ParameterError("offset u must be > 0")
    c = u + sample.vs
    with np.errstate(over="ignore"):
        denom = np.expm1(c / alpha)
    return float(np.mean(c * (1.0 + (1.0 - beta) / denom)))


def bias_correction_integral(beta, n, *, rel_tol=1e-10, max_panels=4096) -> float:
    """Expected exceedance of the sample minimum over the location, in scale
    units: the integral over (0, inf) of ``(1 - (1 - e^-y)^beta)^n`` dy.

    Evaluated as ``integral over (0,1) of (1 - z^beta)^n / (1-z) dz`` after
    ``z = 1 - e^-y``, which is bounded on the closed interval.
    """
    if not np.isfinite(beta) or beta <= 0.0:
        raise ParameterError(f"beta must be finite and > 0, got {beta}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")

    depth = int(np.ceil(np.log2(max(n, 4)))) + 6
    upper = 4 + max(0, int(np.ceil(np.log2(max(beta, 2.0)))))
    breaks = dyadic_breakpoints(depth, upper)

    if beta >= 1.0:
        def f(z):
            with np.errstate(divide="ignore"):
                lz = np.log(z)
            # (1 - z^beta)^n via expm1/log1p keeps digits when z^beta nears 1
            one_minus_zb = -np.expm1(beta * lz)
            out = np.zeros_like(z)
            pos = one_minus_zb > 0.0
            out[pos] = np.exp(n * np.log(one_minus_zb[pos]) - np.log1p(-z[pos]))
            return out[None, :]
    else:
        # substitute y = z^beta: the integrand becomes
        # (1/beta) (1-y)^n y^(1/beta-1) / (1 - y^(1/beta)), smooth on (0, 1)
        inv = 1.0 / beta

        def f(y):
            ly = np.log(y)
            log_num = n * np.log1p(-y) + (inv - 1.0) * ly
            denom = -np.expm1(inv * ly)
            out = np.zeros_like(y)
            pos = denom > 0.0
            out[pos] = np.exp(log_num[pos] - np.log(beta)) / denom[pos]
            return out[None, :]

    vals, _, _ = integrate_panels(f, breaks, rel_tol, max_panels=max_panels)
    return float(vals[0])
