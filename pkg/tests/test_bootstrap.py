import numpy as np
import pytest

from gelpf import GEParams, SortedSample, bootstrap_ci, fit_lpf, sample as draw
from gelpf.exceptions import DegenerateBootstrapError, ParameterError


@pytest.fixture(scope="module")
def small_report(electrical_sample_module, electrical_fit_module):
    return bootstrap_ci(
        electrical_sample_module, electrical_fit_module,
        reps=400, beta_cutoff=12.0, seed=4, threads=2,
    )


@pytest.fixture(scope="module")
def electrical_sample_module():
    from gelpf.dataio import electrical_lifetimes

    return SortedSample.from_data(electrical_lifetimes())


@pytest.fixture(scope="module")
def electrical_fit_module(electrical_sample_module):
    return fit_lpf(electrical_sample_module)


class TestDeterminismAndShape:
    def test_bit_identical_under_seed(self, electrical_sample_module, electrical_fit_module):
        a = bootstrap_ci(electrical_sample_module, electrical_fit_module,
                         reps=150, beta_cutoff=12.0, seed=9, threads=2)
        b = bootstrap_ci(electrical_sample_module, electrical_fit_module,
                         reps=150, beta_cutoff=12.0, seed=9, threads=1)
        assert a.intervals == b.intervals
        assert a.rejection_proportion == b.rejection_proportion

    def test_accounting(self, small_report):
        r = small_report
        assert r.replicates_used + r.rejected == r.replicates_requested
        assert 0.0 <= r.rejection_proportion <= 1.0

    def test_interval_order(self, small_report):
        for by in small_report.intervals.values():
            for lo, hi in by.values():
                assert lo < hi

    def test_nesting(self, small_report):
        lo95 = small_report.intervals[0.95]
        lo99 = small_report.intervals[0.99]
        for key in ("shape", "scale", "location"):
            assert lo99[key][0] <= lo95[key][0]
            assert lo99[key][1] >= lo95[key][1]

    def test_point_inside_intervals(self, small_report):
        for by in small_report.intervals.values():
            for key, (lo, hi) in by.items():
                assert lo <= small_report.point_estimate[key] <= hi

    def test_as_dict_roundtrips_through_json(self, small_report):
        import json

        blob = json.dumps(small_report.as_dict())
        back = json.loads(blob)
        assert back["replicates_used"] == small_report.replicates_used
        got = back["intervals"]["0.95"]["shape"]
        assert tuple(got) == small_report.intervals[0.95]["shape"]


class TestValidationAndDegeneracy:
    def test_minimum_replicates(self, electrical_sample_module, electrical_fit_module):
        with pytest.raises(ParameterError):
            bootstrap_ci(electrical_sample_module, electrical_fit_module, reps=10)

    def test_level_domain(self, electrical_sample_module, electrical_fit_module):
        with pytest.raises(ParameterError):
            bootstrap_ci(electrical_sample_module, electrical_fit_module,
                         reps=100, levels=(1.2,))

    def test_degenerate_when_cutoff_below_typical_estimates(
            self, electrical_sample_module, electrical_fit_module):
        # a cutoff below the point estimate rejects most replicates
        with pytest.raises(DegenerateBootstrapError):
            bootstrap_ci(electrical_sample_module, electrical_fit_module,
                         reps=100, beta_cutoff=0.9, seed=1, threads=1)


@pytest.mark.slow
def test_coverage_smoke():
    # 95% interval for the shape should cover the truth for most datasets;
    # small-sample percentile bootstrap over- and under-coverage is expected,
    # hence the wide acceptance band.  Datasets whose fit is itself rejected,
    # or whose bootstrap is degenerate (over half the replicates above the
    # cutoff), have no interval by construction and do not enter the rate;
    # they must stay rare.
    truth = GEParams(1.0, 1.5, 0.0)
    n_data, n_sets, reps = 50, 200, 199
    hits = evaluable = 0
    for i in range(n_sets):
        rng = np.random.default_rng([321, i])
        s = SortedSample.from_data(draw(truth, n_data, rng))
        fit = fit_lpf(s, beta_cutoff=12.0, warm_start=(1.0, 1.5))
        if fit.rejected:
            continue
        try:
            rep = bootstrap_ci(s, fit, reps=reps, levels=(0.95,), beta_cutoff=12.0,
                               seed=1000 + i, threads=2)
        except DegenerateBootstrapError:
            continue
        evaluable += 1
        lo, hi = rep.intervals[0.95]["shape"]
        hits += lo <= truth.beta <= hi
    assert evaluable >= 0.9 * n_sets, f"only {evaluable}/{n_sets} evaluable"
    rate = hits / evaluable
    assert 0.88 <= rate <= 0.99, f"coverage {rate}"
