"""Validate the shipped critical-value tables against fresh seeded
simulations from the same generators (modest replication counts; the
tolerances reflect Monte Carlo error at these sizes)."""

import numpy as np
import pytest

from cointsearch.johansen import RESTRICTED_CONSTANT, RESTRICTED_TREND, critical_value
from cointsearch.tabulation import (
    simulate_df_stats,
    simulate_johansen_asymptotic,
)
from cointsearch.unitroot import df_pvalue, eg_critical_value


@pytest.mark.slow
@pytest.mark.parametrize("case,k", [("constant", 2), ("constant_and_trend", 3),
                                    ("none", 2)])
def test_df_finite_sample_surface(case, k):
    n = 200
    stats = simulate_df_stats(k, case, n, 40_000, seed=555)
    for level in (0.05, 0.10):
        simulated = float(np.quantile(stats, level))
        shipped = eg_critical_value(k, case, level, n=n)
        assert shipped == pytest.approx(simulated, abs=0.05)


@pytest.mark.slow
def test_df_pvalue_surface_matches_simulation():
    stats = np.sort(simulate_df_stats(1, "constant", 1000, 40_000, seed=556))
    for p in (0.01, 0.05, 0.10, 0.50):
        q = float(np.quantile(stats, p))
        assert df_pvalue(q, "constant", n_regressors=1) == pytest.approx(
            p, abs=0.012)


@pytest.mark.slow
@pytest.mark.parametrize("case", [RESTRICTED_CONSTANT, RESTRICTED_TREND])
@pytest.mark.parametrize("m", [1, 2, 4])
def test_johansen_quantiles(case, m):
    trace, maxeig = simulate_johansen_asymptotic(m, case, 30_000, seed=557,
                                                 steps=1200)
    for stat, sample in (("trace", trace), ("max_eig", maxeig)):
        for level in (0.05, 0.10):
            simulated = float(np.quantile(sample, 1.0 - level))
            shipped = critical_value(case, stat, m, level)
            tol = 0.05 * shipped + 0.1
            assert shipped == pytest.approx(simulated, abs=tol), (stat, level)


def test_table_files_parse_and_cover_declared_range():
    from cointsearch.unitroot import _df_tables
    crit, pval, bounds = _df_tables()
    for case in ("none", "constant", "constant_and_trend"):
        for k in range(0, 7):
            assert set(crit[(case, k)]) == {0.01, 0.05, 0.10}
            assert "small" in pval[(case, k)] and "large" in pval[(case, k)]
            tau_min, tau_star, tau_max = bounds[(case, k)]
            assert tau_min < tau_star < tau_max

    from cointsearch.johansen import _johansen_tables
    grids = _johansen_tables()
    for case in (RESTRICTED_CONSTANT, RESTRICTED_TREND):
        for stat in ("trace", "max_eig"):
            for m in range(1, 7):
                cdf, q = grids[(case, stat, m)]
                assert cdf.shape == q.shape and cdf.shape[0] >= 15
                assert np.all(np.diff(cdf) > 0)
                assert np.all(np.diff(q) > 0)
