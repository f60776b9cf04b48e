import numpy as np
import pytest

from cointsearch.errors import ConfigError
from cointsearch.forecast import (
    ForecastConfig,
    comparison_to_csv,
    forecast_compare,
    mc_forecast,
    rep_generator,
)
from cointsearch.regress import difference_ols, nls_ec_fit
from cointsearch.series import AlignedDataset
from cointsearch.specs import CandidateSpec

from conftest import ar1, make_rng, random_walk


def exact_dataset(n=60, start=1950):
    """y is an exact linear function of x: zero-noise propagation checks."""
    rng = make_rng(20)
    x = random_walk(rng, n)
    y = 3.0 + 0.5 * x
    return AlignedDataset(start, {"y": y, "x": x}, "y")


def ec_dataset(seed=21, n=120, start=1950, phi=0.6, noise=0.3):
    rng = make_rng(seed)
    x = random_walk(rng, n)
    y = 2.0 + 0.7 * x + ar1(rng, n, phi=phi, scale=noise)
    return AlignedDataset(start, {"y": y, "x": x}, "y")


class TestMcForecast:
    def test_noiseless_forecast_is_exact(self):
        data = exact_dataset()
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=False)
        train = data.window(1950, 1989)
        est = nls_ec_fit(spec, train)
        cfg = ForecastConfig(reps=50, seed=1, horizon_start=1990,
                             horizon_end=2009,
                             include_coefficient_uncertainty=False)
        bands = mc_forecast(spec, est, data, cfg)
        years = bands.years - data.first_year
        expected = 3.0 + 0.5 * data.column("x")[years]
        np.testing.assert_allclose(bands.mean, expected, rtol=1e-8)
        np.testing.assert_allclose(bands.upper - bands.lower, 0.0, atol=1e-8)

    def test_drift_only_bands_grow_like_sqrt_h(self):
        rng = make_rng(22)
        y = np.cumsum(0.3 + 1.0 * rng.standard_normal(160))
        data = AlignedDataset(1900, {"y": y}, "y")
        spec = CandidateSpec("differences", (), "constant")
        train = data.window(1900, 1999)
        est = difference_ols(spec, train)
        cfg = ForecastConfig(reps=10_000, seed=2, horizon_start=2000,
                             horizon_end=2059,
                             include_coefficient_uncertainty=False)
        bands = mc_forecast(spec, est, data, cfg)
        width = bands.upper - bands.lower
        h = np.arange(1, width.shape[0] + 1)
        ratio = width / np.sqrt(h)
        np.testing.assert_allclose(ratio, ratio[0], rtol=0.05)

    def test_ec_band_plateaus_while_short_run_diverges(self):
        data = ec_dataset(n=220)
        train_end = 1950 + 119
        cfg = ForecastConfig(reps=4000, seed=3, horizon_start=train_end + 1,
                             horizon_end=1950 + 219,
                             include_coefficient_uncertainty=False)
        train = data.window(1950, train_end)

        ec_spec = CandidateSpec("levels", ("x",), "constant", phi_free=True)
        ec_est = nls_ec_fit(ec_spec, train)
        ec_bands = mc_forecast(ec_spec, ec_est, data, cfg)
        ec_width = ec_bands.upper - ec_bands.lower

        sr_spec = CandidateSpec("differences", ("x",), "constant")
        sr_est = difference_ols(sr_spec, train)
        sr_bands = mc_forecast(sr_spec, sr_est, data, cfg)
        sr_width = sr_bands.upper - sr_bands.lower

        # short-run width keeps growing; EC width levels off near the
        # stationary AR(1) band
        assert sr_width[-1] > 2.5 * sr_width[4]
        assert ec_width[-1] < 1.5 * ec_width[4]
        sigma = np.sqrt(ec_est.ssr / (ec_est.n_obs - ec_est.n_params))
        plateau = 4.0 * sigma / np.sqrt(1.0 - ec_est.phi ** 2)
        assert ec_width[-1] == pytest.approx(plateau, rel=0.1)

    def test_band_width_nonnegative_and_monotone_for_short_run(self):
        data = ec_dataset(seed=23, n=150)
        spec = CandidateSpec("differences", ("x",), "constant")
        train = data.window(1950, 2049)
        est = difference_ols(spec, train)
        cfg = ForecastConfig(reps=3000, seed=4, horizon_start=2050,
                             horizon_end=2099)
        bands = mc_forecast(spec, est, data, cfg)
        width = bands.upper - bands.lower
        assert np.all(width >= 0.0)
        assert np.all(np.diff(width) > -0.05 * width[:-1])

    def test_seed_reproducibility_and_thread_independence(self):
        data = ec_dataset(seed=24)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=True)
        train = data.window(1950, 2049)
        est = nls_ec_fit(spec, train)
        cfg = ForecastConfig(reps=500, seed=5, horizon_start=2050,
                             horizon_end=2069)
        a = mc_forecast(spec, est, data, cfg, threads=1)
        b = mc_forecast(spec, est, data, cfg, threads=1)
        c = mc_forecast(spec, est, data, cfg, threads=4)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.mean, c.mean)
        np.testing.assert_array_equal(a.upper, c.upper)

    def test_mean_converges_to_conditional_expectation(self):
        # with uncertainty off, the MC mean approaches the analytic
        # conditional expectation of the AR(1) recursion
        data = ec_dataset(seed=25, n=140, phi=0.5, noise=0.4)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=True)
        train = data.window(1950, 2049)
        est = nls_ec_fit(spec, train)
        cfg = ForecastConfig(reps=100_000, seed=6, horizon_start=2050,
                             horizon_end=2064,
                             include_coefficient_uncertainty=False)
        bands = mc_forecast(spec, est, data, cfg)
        idx = bands.years - data.first_year
        x = data.column("x")
        f = est.betas["x"] * x + est.constant
        eta = float(data.column("y")[idx[0] - 1] - f[idx[0] - 1])
        expected = []
        for i in idx:
            eta *= est.phi
            expected.append(f[i] + eta)
            sigma = np.sqrt(est.ssr / (est.n_obs - est.n_params))
        mc_se = 3.0 * sigma / np.sqrt(cfg.reps) / np.sqrt(1 - est.phi**2)
        np.testing.assert_allclose(bands.mean, expected, atol=3 * mc_se + 1e-9)

    def test_horizon_overlap_rejected(self):
        data = ec_dataset(seed=26)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=False)
        est = nls_ec_fit(spec, data)
        cfg = ForecastConfig(reps=10, seed=7, horizon_start=2000,
                             horizon_end=2019)
        with pytest.raises(ConfigError):
            mc_forecast(spec, est, data, cfg)

    def test_non_psd_covariance_falls_back_to_diagonal(self):
        import dataclasses
        data = ec_dataset(seed=32)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=False)
        train = data.window(1950, 2049)
        est = nls_ec_fit(spec, train)
        bad_cov = est.covariance.copy()
        bad_cov[0, 1] = bad_cov[1, 0] = 10.0 * np.sqrt(
            bad_cov[0, 0] * bad_cov[1, 1])
        broken = dataclasses.replace(est, covariance=bad_cov)
        cfg = ForecastConfig(reps=200, seed=13, horizon_start=2050,
                             horizon_end=2059)
        bands = mc_forecast(spec, broken, data, cfg)
        assert bands.covariance_fallback
        clean = mc_forecast(spec, est, data, cfg)
        assert not clean.covariance_fallback

    def test_quantile_band_option(self):
        data = ec_dataset(seed=27)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=False)
        train = data.window(1950, 2049)
        est = nls_ec_fit(spec, train)
        cfg = ForecastConfig(reps=4000, seed=8, horizon_start=2050,
                             horizon_end=2059, band="quantile")
        bands = mc_forecast(spec, est, data, cfg)
        assert np.all(bands.lower <= bands.mean)
        assert np.all(bands.mean <= bands.upper)


class TestRepGenerator:
    def test_streams_differ_across_reps(self):
        a = rep_generator(1, 0, 0).standard_normal(4)
        b = rep_generator(1, 0, 1).standard_normal(4)
        assert not np.allclose(a, b)

    def test_streams_differ_across_splits(self):
        a = rep_generator(1, 0, 5).standard_normal(4)
        b = rep_generator(1, 1, 5).standard_normal(4)
        assert not np.allclose(a, b)

    def test_deterministic(self):
        np.testing.assert_array_equal(rep_generator(9, 2, 3).standard_normal(8),
                                      rep_generator(9, 2, 3).standard_normal(8))


class TestForecastCompare:
    def test_identical_models_identical_rows(self):
        data = ec_dataset(seed=28, n=140)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=True)
        cfg = ForecastConfig(reps=400, seed=9, horizon_start=0, horizon_end=0)
        report = forecast_compare([spec, spec], data, [(2059, 2089)], cfg)
        a, b = report.rows
        assert a.rmse == b.rmse
        np.testing.assert_array_equal(a.mean, b.mean)

    def test_single_split_single_model(self):
        data = ec_dataset(seed=29, n=140)
        spec = CandidateSpec("differences", ("x",), "constant")
        cfg = ForecastConfig(reps=200, seed=10, horizon_start=0, horizon_end=0)
        report = forecast_compare([spec], data, [(2059, 2089)], cfg)
        assert len(report.rows) == 1
        assert report.rows[0].available

    def test_failed_window_marked_unavailable(self):
        data = ec_dataset(seed=30, n=60)
        spec = CandidateSpec("levels", ("x",), "constant", phi_free=True)
        cfg = ForecastConfig(reps=100, seed=11, horizon_start=0, horizon_end=0)
        # training window too short to estimate
        report = forecast_compare([spec], data, [(1953, 2009)], cfg)
        assert not report.rows[0].available
        assert report.rows[0].detail

    def test_csv_serialization(self):
        data = ec_dataset(seed=31, n=140)
        spec = CandidateSpec("differences", ("x",), "constant")
        cfg = ForecastConfig(reps=100, seed=12, horizon_start=0, horizon_end=0)
        report = forecast_compare([spec], data, [(2059, 2069)], cfg)
        csv_text = comparison_to_csv(report)
        lines = csv_text.strip().splitlines()
        assert lines[0].startswith("train_end,horizon_end,model,year")
        assert len(lines) == 1 + 10


class TestForecastConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            ForecastConfig(reps=0)
        with pytest.raises(ConfigError):
            ForecastConfig(horizon_start=5, horizon_end=4)
        with pytest.raises(ConfigError):
            ForecastConfig(band="nope")
