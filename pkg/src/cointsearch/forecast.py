"""Monte Carlo in-sample forecasting with coefficient uncertainty.

Forecasts condition on the observed predictor paths.  Each repetition
draws a coefficient vector from the estimation's asymptotic normal (when
enabled) and Gaussian innovations with the estimated residual variance,
then propagates the model recursion over the horizon: the AR(1)
error-correction recursion for level-form models, cumulated differences
from the last observed level for short-run models.  Every repetition
draws from its own counter-based Philox substream keyed by
(seed, stream, repetition), so results are reproducible bit for bit
regardless of scheduling or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import ConfigError, EstimationError
from .regress import ECEstimate, NlsOptions, difference_ols, nls_ec_fit
from .series import AlignedDataset
from .specs import CandidateSpec

__all__ = ["ForecastConfig", "ForecastBands", "ComparisonRow",
           "ComparisonReport", "mc_forecast", "forecast_compare",
           "comparison_to_csv"]

_MASK = (1 << 64) - 1


def rep_generator(seed: int, stream: int, rep: int) -> Generator:
    """Counter-based substream for one Monte Carlo repetition."""
    key = np.array([seed & _MASK, ((stream & 0xFFFFFFFF) << 32) | rep],
                   dtype=np.uint64)
    return Generator(Philox(key=key))


@dataclass(frozen=True)
class ForecastConfig:
    reps: int = 10_000
    seed: int = 0
    horizon_start: int = 0
    horizon_end: int = 0
    include_coefficient_uncertainty: bool = True
    band: str = "sd"      # 'sd': mean +- 2 pointwise standard deviations;
                          # 'quantile': central 95.45% band
    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if self.horizon_start > self.horizon_end:
            raise ConfigError("horizon_start must not exceed horizon_end")
        if self.band not in ("sd", "quantile"):
            raise ConfigError("band must be 'sd' or 'quantile'")


@dataclass(frozen=True)
class ForecastBands:
    """Pointwise mean forecast with error bounds."""

    years: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    reps: int
    seed: int
    covariance_fallback: bool = False


@dataclass(frozen=True)
class _Propagator:
    """Precomputed horizon pieces for one (spec, estimate, data) triple."""

    spec: CandidateSpec
    names: tuple[str, ...]
    x_h: np.ndarray        # (h, k) predictor levels over the horizon
    dx_h: np.ndarray       # (h, k) predictor differences over the horizon
    trend_h: np.ndarray    # trend index over the horizon
    y_last: float
    eta_terms: np.ndarray  # (k + det,) regressor values at horizon_start - 1
    sigma: float
    theta: np.ndarray
    chol: np.ndarray | None
    phi_idx: int | None
    fallback: bool


def _prepare(spec: CandidateSpec, estimate: ECEstimate, data: AlignedDataset,
             config: ForecastConfig) -> _Propagator:
    if config.horizon_start <= data.first_year:
        raise ConfigError("the horizon must start after the first data year")
    if config.horizon_end > data.last_year:
        raise ConfigError("predictors are not available over the horizon")
    train_years = config.horizon_start - data.first_year
    if estimate.n_obs + 1 > train_years:
        raise ConfigError("the estimation sample overlaps the forecast horizon")
    years = np.arange(config.horizon_start, config.horizon_end + 1)
    idx = years - data.first_year
    k = len(spec.subset)
    X = (np.column_stack([data.column(nm) for nm in spec.subset])
         if k else np.empty((len(data), 0)))
    x_h = X[idx]
    dx_h = X[idx] - X[idx - 1]
    trend_h = (years - data.first_year + 1).astype(float)
    y = data.column(data.target)
    y_last = float(y[idx[0] - 1])

    # regressors of the level relation at the last pre-horizon year, used
    # to initialize the AR(1) disequilibrium
    prev = idx[0] - 1
    terms = list(X[prev]) if k else []
    if spec.det_terms >= 1:
        terms.append(1.0)
    if spec.det_terms >= 2:
        terms.append(float(prev + 1))
    eta_terms = np.array(terms)

    dof = estimate.n_obs - estimate.n_params
    sigma = float(np.sqrt(estimate.ssr / dof)) if dof > 0 else 0.0
    theta = estimate.coefficients
    chol = None
    fallback = False
    if config.include_coefficient_uncertainty:
        cov = np.asarray(estimate.covariance)
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            chol = np.diag(np.sqrt(np.clip(np.diag(cov), 0.0, None)))
            fallback = True
    phi_idx = (estimate.param_names.index("phi")
               if "phi" in estimate.param_names else None)
    return _Propagator(spec, tuple(estimate.param_names), x_h, dx_h, trend_h,
                       y_last, eta_terms, sigma, theta, chol, phi_idx, fallback)


def _draw_params(p: _Propagator, rng: Generator) -> np.ndarray:
    if p.chol is None:
        return p.theta
    for _ in range(100):
        theta = p.theta + p.chol @ rng.standard_normal(p.theta.shape[0])
        if p.phi_idx is None or abs(theta[p.phi_idx]) < 1.0:
            return theta
    raise EstimationError(
        "could not draw a stationary phi within 100 attempts; the "
        "estimate's phi is too close to the unit circle")


def _propagate(p: _Propagator, theta: np.ndarray, eps: np.ndarray) -> np.ndarray:
    k = len(p.spec.subset)
    betas = theta[:k]
    pos = k
    const = 0.0
    delta = 0.0
    if p.spec.det_terms >= 1:
        const = theta[pos]
        pos += 1
    if p.spec.det_terms >= 2:
        delta = theta[pos]
        pos += 1
    if p.spec.form == "levels":
        phi = theta[p.phi_idx] if p.phi_idx is not None else 0.0
        f_prev = float(p.eta_terms @ np.concatenate([betas, theta[k:pos]]))
        eta = p.y_last - f_prev
        f_h = p.x_h @ betas + const + delta * p.trend_h
        path = np.empty(eps.shape[0])
        for t in range(eps.shape[0]):
            eta = phi * eta + eps[t]
            path[t] = f_h[t] + eta
        return path
    dy = p.dx_h @ betas + const + eps
    return p.y_last + np.cumsum(dy)


def mc_forecast(spec: CandidateSpec, estimate: ECEstimate,
                data: AlignedDataset, config: ForecastConfig,
                stream: int = 0, threads: int = 1) -> ForecastBands:
    """Monte Carlo forecast bands for one fitted candidate.

    The estimate must come from data strictly before ``horizon_start``
    with the trend index anchored at ``data.first_year``; predictors are
    conditioned on over the horizon.  Fixed (seed, stream) gives
    bit-identical output for any thread count.
    """
    p = _prepare(spec, estimate, data, config)
    h = p.x_h.shape[0]
    reps = config.reps
    paths = np.empty((reps, h))

    def run(lo: int, hi: int) -> None:
        for rep in range(lo, hi):
            rng = rep_generator(config.seed, stream, rep)
            theta = _draw_params(p, rng)
            eps = p.sigma * rng.standard_normal(h)
            paths[rep] = _propagate(p, theta, eps)

    if threads > 1:
        chunk = -(-reps // threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda i: run(i, min(i + chunk, reps)),
                          range(0, reps, chunk)))
    else:
        run(0, reps)

    mean = paths.mean(axis=0)
    if config.band == "sd":
        sd = paths.std(axis=0)
        lower, upper = mean - 2.0 * sd, mean + 2.0 * sd
    else:
        from scipy.stats import norm
        tail = float(norm.cdf(-2.0))
        lower = np.quantile(paths, tail, axis=0)
        upper = np.quantile(paths, 1.0 - tail, axis=0)
    years = np.arange(config.horizon_start, config.horizon_end + 1)
    return ForecastBands(years=years, mean=mean, lower=lower, upper=upper,
                         reps=reps, seed=config.seed,
                         covariance_fallback=p.fallback)


@dataclass(frozen=True)
class ComparisonRow:
    train_end: int
    horizon_end: int
    spec_id: str
    available: bool
    years: np.ndarray | None
    mean: np.ndarray | None
    lower: np.ndarray | None
    upper: np.ndarray | None
    realization: np.ndarray | None
    rmse: float | None
    mean_band_width: float | None
    detail: str = ""


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    reps: int
    seed: int


def forecast_compare(specs: list[CandidateSpec], data: AlignedDataset,
                     splits: list[tuple[int, int]],
                     config: ForecastConfig,
                     nls_options: NlsOptions | None = None
                     ) -> ComparisonReport:
    """Re-estimate each candidate on every training window and forecast
    the remaining horizon, reporting mean forecasts, bands, realizations,
    RMSE and mean band width.  Innovation substreams depend on the split
    only, so identical candidates produce identical rows.
    """
    rows = []
    y = data.column(data.target)
    for split_idx, (train_end, horizon_end) in enumerate(splits):
        cfg = ForecastConfig(
            reps=config.reps, seed=config.seed,
            horizon_start=train_end + 1, horizon_end=horizon_end,
            include_coefficient_uncertainty=config.include_coefficient_uncertainty,
            band=config.band)
        train = data.window(data.first_year, train_end)
        years = np.arange(cfg.horizon_start, cfg.horizon_end + 1)
        real = y[years - data.first_year]
        for spec in specs:
            try:
                if spec.form == "levels":
                    est = nls_ec_fit(spec, train, nls_options)
                    if not est.converged:
                        raise EstimationError("NLS did not converge")
                else:
                    est = difference_ols(spec, train)
                bands = mc_forecast(spec, est, data, cfg, stream=split_idx)
            except Exception as exc:  # one bad window must not kill the report
                rows.append(ComparisonRow(train_end, horizon_end, spec.id,
                                          False, None, None, None, None, None,
                                          None, None, detail=str(exc)))
                continue
            err = bands.mean - real
            rows.append(ComparisonRow(
                train_end, horizon_end, spec.id, True,
                bands.years, bands.mean, bands.lower, bands.upper, real,
                float(np.sqrt(np.mean(err ** 2))),
                float(np.mean(bands.upper - bands.lower)),
            ))
    return ComparisonReport(rows=tuple(rows), reps=config.reps,
                            seed=config.seed)


def comparison_to_csv(report: ComparisonReport) -> str:
    """Flatten a comparison report to CSV: one line per
    (split, model, year) with realization, mean and bounds."""
    lines = ["train_end,horizon_end,model,year,realization,mean,lower,upper"]
    for row in report.rows:
        if not row.available:
            continue
        for i, year in enumerate(row.years):
            lines.append(
                f"{row.train_end},{row.horizon_end},{row.spec_id},{int(year)},"
                f"{row.realization[i]:.10g},{row.mean[i]:.10g},"
                f"{row.lower[i]:.10g},{row.upper[i]:.10g}")
    return "\n".join(lines) + "\n"
