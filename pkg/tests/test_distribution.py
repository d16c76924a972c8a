import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gelpf import GEParams, cdf, pdf, quantile, sample
from gelpf.exceptions import ParameterError

params_st = st.builds(
    GEParams,
    alpha=st.floats(0.05, 50.0),
    beta=st.floats(0.05, 20.0),
    gamma=st.floats(-100.0, 100.0),
)


def test_cdf_below_support_is_zero():
    assert cdf(-1.0, GEParams(1.0, 2.0, 0.0)) == 0.0


def test_cdf_exponential_median():
    assert cdf(np.log(2.0), GEParams(1.0, 1.0, 0.0)) == pytest.approx(0.5, abs=1e-15)


def test_cdf_direct_formula():
    want = (1.0 - np.exp(-1.0)) ** 2
    assert cdf(1.0, GEParams(1.0, 2.0, 0.0)) == pytest.approx(want, rel=1e-14)


def test_invalid_params_rejected():
    for bad in [(0.0, 1.0, 0.0), (1.0, -2.0, 0.0), (1.0, 1.0, np.inf), (np.nan, 1.0, 0.0)]:
        with pytest.raises(ParameterError):
            GEParams(*bad)


def test_pdf_exponential_value():
    assert pdf(0.5, GEParams(1.0, 1.0, 0.0)) == pytest.approx(np.exp(-0.5), rel=1e-14)


def test_pdf_outside_support():
    p = GEParams(1.0, 2.0, 1.5)
    assert pdf(1.0, p) == 0.0
    assert pdf(1.5, p) == 0.0


def test_pdf_edge_behavior_by_shape():
    assert pdf(0.0, GEParams(2.0, 0.5, 0.0)) == np.inf
    assert pdf(0.0, GEParams(2.0, 1.0, 0.0)) == pytest.approx(0.5)
    assert pdf(0.0, GEParams(2.0, 3.0, 0.0)) == 0.0


def test_pdf_integrates_to_one():
    # quadrature oracle on a fine grid, beta = 2 integrand is smooth
    p = GEParams(1.0, 2.0, 0.0)
    x = np.linspace(0.0, 60.0, 2_000_001)
    from scipy.integrate import simpson

    total = simpson(pdf(x, p), x=x)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_quantile_median_exponential():
    assert quantile(0.5, GEParams(1.0, 1.0, 0.0)) == pytest.approx(np.log(2.0), rel=1e-14)


def test_quantile_zero_returns_location():
    assert quantile(0.0, GEParams(3.0, 0.7, -4.5)) == -4.5


def test_quantile_reference_value():
    # fitted electrical-lifetime model, median
    p = GEParams(91.1620, 1.0821, -2.7991)
    assert quantile(0.50, p) == pytest.approx(65.4500, abs=5e-4)


def test_quantile_domain_errors():
    p = GEParams(1.0, 1.0, 0.0)
    with pytest.raises(ParameterError):
        quantile(1.0, p)
    with pytest.raises(ParameterError):
        quantile(-0.1, p)


def test_cdf_quantile_roundtrip_grid(rng):
    # location comparable to scale: the 1e-12 contract holds outright
    zetas = np.linspace(0.001, 0.999, 200)
    for _ in range(20):
        p = GEParams(
            alpha=float(rng.uniform(0.05, 50.0)),
            beta=float(rng.uniform(0.05, 20.0)),
            gamma=float(rng.uniform(-2.0, 2.0)) * float(rng.uniform(0.05, 50.0)),
        )
        err = np.abs(cdf(quantile(zetas, p), p) - zetas)
        assert err.max() < 1e-12


@settings(max_examples=150, deadline=None)
@given(params_st, st.floats(0.001, 0.999))
def test_cdf_quantile_roundtrip_conditioned(p, zeta):
    # arbitrary locations: storing the quantile as an absolute double wipes
    # out spacing below eps*|gamma|, so the attainable accuracy is bounded by
    # the condition of the roundtrip, pdf(x) * representation error of x
    x = quantile(zeta, p)
    slack = 8.0 * np.finfo(float).eps * (abs(x) + abs(p.gamma) + p.alpha) * pdf(x, p)
    assert abs(cdf(x, p) - zeta) < 1e-12 + slack


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 50.0), st.floats(0.05, 20.0))
def test_quantile_strictly_increasing(alpha, beta):
    # at location 0 the increments stay representable even for tiny shape
    zs = np.linspace(0.01, 0.99, 25)
    qs = quantile(zs, GEParams(alpha, beta, 0.0))
    assert np.all(np.diff(qs) > 0)


@settings(max_examples=60, deadline=None)
@given(params_st)
def test_quantile_nondecreasing_any_location(p):
    zs = np.linspace(0.01, 0.99, 25)
    qs = quantile(zs, p)
    assert np.all(np.diff(qs) >= 0)


@settings(max_examples=60, deadline=None)
@given(params_st)
def test_cdf_nondecreasing(p):
    x = p.gamma + p.alpha * np.linspace(-1.0, 12.0, 60)
    f = cdf(x, p)
    assert np.all(np.diff(f) >= 0)
    assert f[0] == 0.0
    assert f[-1] <= 1.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.05, 20.0), st.floats(0.05, 50.0),
       st.floats(-50.0, 50.0))
def test_quantile_scale_location_equivariance(zeta, beta, alpha, gamma):
    std = quantile(zeta, GEParams(1.0, beta, 0.0))
    got = quantile(zeta, GEParams(alpha, beta, gamma))
    assert got == pytest.approx(gamma + alpha * std, rel=1e-12, abs=1e-12)


def test_sampler_inverse_transform_at_fixed_uniform():
    # u = 0.5 with unit-exponential parameters maps to log 2
    p = GEParams(1.0, 1.0, 0.0)
    assert quantile(0.5, p) == pytest.approx(np.log(2.0))


def test_sampler_mean_matches_exponential():
    x = sample(GEParams(1.0, 1.0, 0.0), 1_000_000, seed=42)
    assert x.mean() == pytest.approx(1.0, abs=0.01)


def test_sampler_deterministic_under_seed():
    p = GEParams(2.0, 1.5, -1.0)
    a = sample(p, 1000, seed=7)
    b = sample(p, 1000, seed=7)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("p", [GEParams(1.0, 0.5, 0.0), GEParams(2.0, 3.0, 5.0)])
def test_sampler_ks_distance(p):
    x = np.sort(sample(p, 100_000, seed=99))
    n = len(x)
    f = cdf(x, p)
    i = np.arange(1, n + 1)
    d = max((i / n - f).max(), (f - (i - 1) / n).max())
    assert d < 0.01


def test_sample_size_validation():
    with pytest.raises(ParameterError):
        sample(GEParams(1.0, 1.0, 0.0), 0, seed=1)
