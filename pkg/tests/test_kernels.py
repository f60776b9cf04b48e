"""Backend equivalence: the compiled kernels and the NumPy fallback must
agree numerically and make identical discrete choices."""

import numpy as np
import pytest

from cointsearch._kernels import _pure

_core = pytest.importorskip("cointsearch._kernels._core",
                            reason="compiled extension not built")

from conftest import ar1, make_rng, random_walk


def series_zoo(seed, n):
    rng = make_rng(seed)
    return {
        "random_walk": random_walk(rng, n),
        "white_noise": rng.standard_normal(n),
        "ar1": ar1(rng, n, phi=0.7),
        "trending": 0.5 * np.arange(n) + random_walk(rng, n),
        "scaled": 1e5 * random_walk(rng, n),
    }


@pytest.mark.parametrize("case", [0, 1, 2])
@pytest.mark.parametrize("lags", [0, 2, 6])
def test_adf_tstat_matches(case, lags):
    for seed in range(3):
        for name, y in series_zoo(seed, 250).items():
            s_core, n_core = _core.adf_tstat(y, case, lags)
            s_pure, n_pure = _pure.adf_tstat(y, case, lags)
            assert n_core == n_pure
            assert s_core == pytest.approx(s_pure, rel=1e-9, abs=1e-9), name


@pytest.mark.parametrize("case", [0, 1, 2])
def test_adf_best_lag_matches(case):
    for seed in range(6):
        for y in series_zoo(seed, 220).values():
            assert (_core.adf_best_lag(y, case, 10)
                    == _pure.adf_best_lag(y, case, 10))


def test_kpss_statistic_matches():
    for seed in range(5):
        rng = make_rng(seed)
        e = rng.standard_normal(300)
        for bw in (0, 3, 12):
            assert _core.kpss_statistic(e, bw) == pytest.approx(
                _pure.kpss_statistic(e, bw), rel=1e-12)


def test_nw_bandwidth_matches():
    for seed in range(10):
        rng = make_rng(seed)
        for e in (rng.standard_normal(150), ar1(rng, 400, phi=0.9)):
            assert _core.nw_bandwidth(e) == _pure.nw_bandwidth(e)


def test_degenerate_inputs_agree():
    flat = np.ones(80)
    for case in (0, 1, 2):
        sc, _ = _core.adf_tstat(flat, case, 0)
        sp, _ = _pure.adf_tstat(flat, case, 0)
        assert np.isnan(sc) and np.isnan(sp)
    assert _core.nw_bandwidth(np.zeros(60)) == -1
    assert _pure.nw_bandwidth(np.zeros(60)) == -1


def test_dispatcher_exposes_backend():
    from cointsearch import _kernels
    assert _kernels.BACKEND in ("cython", "python")
    assert callable(_kernels.adf_tstat)
