import numpy as np
import pytest

from cointsearch.cointegration import (
    Thresholds,
    bg_lm_test,
    check_candidate,
    eg_step1,
)
from cointsearch.errors import DegenerateSeriesError
from cointsearch.series import AlignedDataset
from cointsearch.specs import CandidateSpec

from conftest import ar1, cointegrated_dataset, make_rng, random_walk

SPEC2 = CandidateSpec("levels", ("x1", "x2"), "constant", phi_free=False)


def two_rw_dataset(seed, n=200):
    rng = make_rng(seed)
    return AlignedDataset(1900, {
        "y": random_walk(rng, n),
        "x1": random_walk(rng, n),
        "x2": random_walk(rng, n),
    }, "y")


class TestEgStep1:
    def test_size_on_independent_walks(self):
        rejections = sum(
            eg_step1(SPEC2, two_rw_dataset(seed)).cointegrated
            for seed in range(2000)
        )
        assert rejections / 2000 == pytest.approx(0.05, abs=0.02)

    def test_power_on_cointegrated_pair(self):
        spec = CandidateSpec("levels", ("x",), "constant")
        hits = 0
        for seed in range(200):
            rng = make_rng(10_000 + seed)
            x = random_walk(rng, 200)
            y = 2.0 * x + ar1(rng, 200, phi=0.5, scale=0.3)
            data = AlignedDataset(1900, {"y": y, "x": x}, "y")
            hits += eg_step1(spec, data).cointegrated
        assert hits / 200 >= 0.90

    def test_identical_series_degenerate(self):
        rng = make_rng(1)
        x = random_walk(rng, 100)
        data = AlignedDataset(1900, {"y": x.copy(), "x": x}, "y")
        res = eg_step1(CandidateSpec("levels", ("x",), "none"), data)
        assert not res.cointegrated
        assert res.failure is not None

    def test_collinear_predictors_fold_into_diagnostic(self):
        rng = make_rng(2)
        x = random_walk(rng, 100)
        data = AlignedDataset(1900, {
            "y": random_walk(rng, 100), "x1": x, "x2": 2.0 * x}, "y")
        res = eg_step1(CandidateSpec("levels", ("x1", "x2"), "constant"), data)
        assert not res.cointegrated
        assert "failed" in res.failure

    def test_twins_would_share_result(self):
        data = two_rw_dataset(3)
        a = eg_step1(SPEC2, data)
        b = eg_step1(SPEC2.twin(), data)
        assert a.statistic == b.statistic


class TestBgLm:
    def _design(self, n):
        return np.column_stack([np.ones(n)])

    def test_null_rate_at_filter_threshold(self):
        # iid residuals should clear the 0.20 filter about 80% of the time
        rng = make_rng(4)
        n = 100
        X = self._design(n)
        passes = 0
        reps = 2000
        for _ in range(reps):
            e = rng.standard_normal(n)
            e = e - e.mean()
            passes += bg_lm_test(e, X, lags=2).p_value > 0.20
        assert passes / reps == pytest.approx(0.80, abs=0.03)

    def test_power_against_strong_ar1(self):
        rng = make_rng(5)
        n = 100
        X = self._design(n)
        hits = 0
        for _ in range(500):
            e = ar1(rng, n, phi=0.9)
            hits += bg_lm_test(e - e.mean(), X, lags=2).p_value < 0.01
        assert hits / 500 >= 0.99

    def test_zero_residuals(self):
        with pytest.raises(DegenerateSeriesError):
            bg_lm_test(np.zeros(50), self._design(50), lags=2)

    def test_lag_bounds(self):
        with pytest.raises(ValueError):
            bg_lm_test(np.ones(20), self._design(20), lags=10)

    def test_matches_statsmodels(self):
        sm_diag = pytest.importorskip("statsmodels.stats.diagnostic")
        sm_api = pytest.importorskip("statsmodels.api")
        rng = make_rng(6)
        X = np.column_stack([np.ones(120), rng.standard_normal((120, 2))])
        y = X @ np.array([1.0, 0.5, -0.3]) + ar1(rng, 120, phi=0.4)
        res = sm_api.OLS(y, X).fit()
        lm, lmp, _, _ = sm_diag.acorr_breusch_godfrey(res, nlags=2)
        mine = bg_lm_test(res.resid, X, lags=2)
        assert mine.lm_statistic == pytest.approx(lm, rel=1e-6)
        assert mine.p_value == pytest.approx(lmp, rel=1e-6)


class TestCheckCandidate:
    def test_cointegrated_dgp_survives(self):
        # the 0.20-level BG filter discards roughly a fifth of correctly
        # specified candidates by construction, so "most" means ~0.8
        survivors = 0
        spec = CandidateSpec("levels", ("x3", "x5"), "constant", phi_free=True)
        for seed in range(50):
            data = cointegrated_dataset(seed=20_000 + seed)
            out = check_candidate(spec, data)
            survivors += out.survivor
            if out.survivor:
                assert out.bg.p_value > 0.20
                assert out.screen.statistic < out.screen.critical_value
        assert survivors / 50 >= 0.6

    def test_independent_walks_discarded_at_screen(self):
        spec = CandidateSpec("levels", ("x1", "x2"), "constant", phi_free=False)
        reasons = [check_candidate(spec, two_rw_dataset(30_000 + s)).reason
                   for s in range(300)]
        assert reasons.count("eg") / 300 == pytest.approx(0.95, abs=0.03)

    def test_ar2_noise_discarded_by_bglm_more_often(self):
        # under a phi=0 candidate, AR(2) noise in the relation should trip
        # the BG filter more often than white noise does
        def run(ar2):
            spec = CandidateSpec("levels", ("x",), "constant", phi_free=False)
            discarded = 0
            for seed in range(150):
                rng = make_rng(40_000 + seed)
                x = random_walk(rng, 200)
                eps = 0.2 * rng.standard_normal(200)
                eta = np.zeros(200)
                for t in range(2, 200):
                    eta[t] = (1.1 * eta[t-1] - 0.3 * eta[t-2] + eps[t]
                              if ar2 else eps[t])
                y = 1.0 + 0.5 * x + eta
                data = AlignedDataset(1900, {"y": y, "x": x}, "y")
                out = check_candidate(spec, data)
                discarded += out.reason == "bglm"
            return discarded / 150

        assert run(ar2=True) > run(ar2=False) + 0.3

    def test_deterministic(self):
        data = cointegrated_dataset(seed=50)
        spec = CandidateSpec("levels", ("x3", "x5"), "constant", phi_free=True)
        a = check_candidate(spec, data)
        b = check_candidate(spec, data)
        assert a.survivor == b.survivor
        if a.survivor:
            assert a.estimate.ssr == b.estimate.ssr
            assert a.bg.p_value == b.bg.p_value

    def test_difference_candidate_pipeline(self):
        data = cointegrated_dataset(seed=51)
        spec = CandidateSpec("differences", ("x3", "x5"), "constant")
        out = check_candidate(spec, data)
        assert out.screen is None
        assert out.estimate is not None or out.reason == "bglm"

    def test_thresholds_validation(self):
        with pytest.raises(ValueError):
            Thresholds(eg_level=0.0)
        with pytest.raises(ValueError):
            Thresholds(bg_design="other")
