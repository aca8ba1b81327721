import numpy as np
import pytest

from tsecon.dataset import AnnualSeries, Dataset, load_dataset


@pytest.fixture(scope="session")
def dataset():
    return load_dataset()


def make_dataset(**series):
    """Build an in-memory dataset from name -> (start_year, values) pairs."""
    out = {}
    for name, (start, values) in series.items():
        out[name] = AnnualSeries(name, start, tuple(float(v) for v in values))
    return Dataset(out)


@pytest.fixture
def toy_dataset():
    rng = np.random.default_rng(7)
    n = 40
    x1 = rng.normal(0, 1, n)
    x2 = rng.normal(0, 1, n)
    y = 1.5 + 2.0 * x1 - 0.7 * x2 + rng.normal(0, 0.3, n)
    return make_dataset(y=(1970, y), x1=(1970, x1), x2=(1970, x2))
