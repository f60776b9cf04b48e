import numpy as np
import pytest

from cointsearch.series import AlignedDataset, TimeSeries


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_walk(rng, n, scale=1.0, drift=0.0):
    return np.cumsum(drift + scale * rng.standard_normal(n))


def ar1(rng, n, phi, scale=1.0):
    eps = scale * rng.standard_normal(n)
    out = np.empty(n)
    out[0] = eps[0] / np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        out[t] = phi * out[t - 1] + eps[t]
    return out


def cointegrated_dataset(seed, n=200, beta3=0.8, beta5=0.5, const=1.0,
                         phi=0.5, noise=0.15, start_year=1900):
    """y = const + beta3*x3 + beta5*x5 + AR(1) noise, with three irrelevant
    independent random walks x1, x2, x4."""
    rng = make_rng(seed)
    cols = {f"x{i}": random_walk(rng, n) for i in (1, 2, 3, 4, 5)}
    eta = ar1(rng, n, phi, scale=noise)
    cols["y"] = const + beta3 * cols["x3"] + beta5 * cols["x5"] + eta
    return AlignedDataset(start_year, cols, "y")


def null_dataset(seed, n=200, k=5, start_year=1900):
    """Target and predictors all independent random walks."""
    rng = make_rng(seed)
    cols = {f"x{i}": random_walk(rng, n) for i in range(1, k + 1)}
    cols["y"] = random_walk(rng, n)
    return AlignedDataset(start_year, cols, "y")


@pytest.fixture
def coint_data():
    return cointegrated_dataset(seed=42)


@pytest.fixture
def rw_series():
    rng = make_rng(3)
    return TimeSeries("rw", 1950, random_walk(rng, 300))


@pytest.fixture
def wn_series():
    rng = make_rng(4)
    return TimeSeries("wn", 1950, rng.standard_normal(300))
