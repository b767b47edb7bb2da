import numpy as np
import pytest

from mdrscreen import partition_slices, validate_dataset


def random_survival_data(rng, n, p, censor_frac=0.3, tie_free=True):
    """Random dataset with both status groups guaranteed non-empty."""
    x = rng.standard_normal((n, p)) * rng.uniform(0.5, 2.0) + rng.uniform(-1, 1)
    times = rng.exponential(2.0, size=n)
    if tie_free:
        times += np.arange(n) * 1e-9  # break accidental ties deterministically
    status = (rng.random(n) >= censor_frac).astype(int)
    status[0], status[1] = 1, 0
    return validate_dataset(x, times, status)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_data(rng):
    return random_survival_data(rng, 60, 4)


@pytest.fixture
def small_partition(small_data):
    return partition_slices(small_data, 4, 3)
