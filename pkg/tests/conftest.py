import numpy as np
import pytest

from gelpf import SortedSample, fit_lpf
from gelpf.dataio import electrical_lifetimes


@pytest.fixture(scope="session")
def electrical_sample() -> SortedSample:
    return SortedSample.from_data(electrical_lifetimes())


@pytest.fixture(scope="session")
def electrical_fit(electrical_sample):
    return fit_lpf(electrical_sample)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
