"""Per-candidate checking: Engle-Granger screening and residual filtering.

A level-form candidate passes through three gates: the step-1 levels OLS
with a plain DF test on its residuals against the asymptotic critical
value, the EC estimation (NLS, or OLS for the phi-restricted twin), and a
Breusch-Godfrey LM filter on the estimated residuals.  Failures never
abort a batch; every outcome is recorded with a machine-readable reason.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from . import _kernels as kernels
from .errors import CointsearchError, DegenerateSeriesError
from .regress import (
    ECEstimate,
    NlsOptions,
    OlsEstimate,
    difference_design,
    difference_ols,
    ec_residuals_and_jacobian,
    levels_design,
    levels_ols,
    nls_ec_fit,
)
from .series import AlignedDataset
from .specs import CandidateSpec
from .unitroot import eg_critical_value

__all__ = [
    "Thresholds",
    "EgScreenResult",
    "BgLmResult",
    "CandidateOutcome",
    "eg_step1",
    "bg_lm_test",
    "check_candidate",
]


@dataclass(frozen=True)
class Thresholds:
    """Screening settings; defaults follow the generator's standard run."""

    eg_level: float = 0.05
    bglm_level: float = 0.20
    bglm_lags: int = 2
    bg_design: str = "jacobian"   # or "regressors"
    eg_augment_lags: int = 0

    def __post_init__(self) -> None:
        for name in ("eg_level", "bglm_level"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.bglm_lags < 1:
            raise ValueError("bglm_lags must be positive")
        if self.bg_design not in ("jacobian", "regressors"):
            raise ValueError("bg_design must be 'jacobian' or 'regressors'")


@dataclass(frozen=True)
class EgScreenResult:
    """Step-1 screen shared by a phi-restricted / phi-free twin pair."""

    cointegrated: bool
    statistic: float | None
    critical_value: float | None
    level: float
    levels_fit: OlsEstimate | None
    failure: str | None = None


@dataclass(frozen=True)
class BgLmResult:
    """Breusch-Godfrey LM test for residual serial correlation."""

    lm_statistic: float
    p_value: float
    lags: int


def eg_step1(spec: CandidateSpec, data: AlignedDataset,
             level: float = 0.05, augment_lags: int = 0) -> EgScreenResult:
    """First Engle-Granger step for a level-form candidate.

    OLS of the target on the candidate's predictors and deterministic
    terms, then a DF test (no deterministics, optional augmentation) on
    the residuals against the asymptotic critical value for the subset
    size.  Numerical failures are folded into a non-cointegrated result
    with a diagnostic instead of raising.
    """
    if spec.form != "levels":
        raise ValueError("the EG screen applies to level-form candidates")
    cv = eg_critical_value(len(spec.subset), spec.deterministic, level)
    try:
        fit, _ = levels_ols(spec, data, drop_first=False)
    except CointsearchError as exc:
        return EgScreenResult(False, None, None, level, None,
                              failure=f"levels regression failed: {exc}")
    stat, _ = kernels.adf_tstat(fit.residuals, kernels.CASE_NONE,
                                int(augment_lags))
    if not np.isfinite(stat):
        return EgScreenResult(False, None, None, level, fit,
                              failure="degenerate residual DF regression "
                                      "(residuals have no variation)")
    return EgScreenResult(bool(stat < cv), float(stat), float(cv), level, fit)


def bg_lm_test(residuals: np.ndarray, design: np.ndarray,
               lags: int = 2) -> BgLmResult:
    """Breusch-Godfrey LM test with pre-sample residuals set to zero.

    The auxiliary regression runs the residuals on the model design plus
    ``lags`` lagged residual columns; the statistic n*R^2 is referred to
    chi-square with ``lags`` degrees of freedom.  R^2 is centered when the
    design contains a constant column.
    """
    e = np.asarray(residuals, dtype=float).ravel()
    X = np.atleast_2d(np.asarray(design, dtype=float))
    if X.shape[0] != e.shape[0]:
        raise ValueError("residuals and design have different lengths")
    n = e.shape[0]
    if lags < 1 or lags >= n // 2:
        raise ValueError("lags must satisfy 1 <= lags < n/2")
    lagged = np.zeros((n, lags))
    for j in range(1, lags + 1):
        lagged[j:, j - 1] = e[:-j]
    aux = np.column_stack([X, lagged])
    has_const = any(
        np.ptp(X[:, c]) == 0.0 and X[0, c] != 0.0 for c in range(X.shape[1])
    )
    sst = float(((e - e.mean()) ** 2).sum()) if has_const else float(e @ e)
    if sst <= 0.0:
        raise DegenerateSeriesError("residuals have no variation")
    coef, *_ = np.linalg.lstsq(aux, e, rcond=None)
    resid_aux = e - aux @ coef
    r2 = 1.0 - float(resid_aux @ resid_aux) / sst
    r2 = min(max(r2, 0.0), 1.0)
    lm = n * r2
    return BgLmResult(lm_statistic=float(lm),
                      p_value=float(chi2.sf(lm, lags)), lags=lags)


@dataclass(frozen=True)
class CandidateOutcome:
    """Disposition of one candidate: survivor, or discarded with reason
    in {'eg', 'bglm', 'error'}."""

    spec: CandidateSpec
    survivor: bool
    reason: str | None
    detail: str | None
    screen: EgScreenResult | None
    estimate: ECEstimate | None
    bg: BgLmResult | None


def _discard(spec, reason, detail, screen=None, estimate=None, bg=None):
    return CandidateOutcome(spec, False, reason, detail, screen, estimate, bg)


def _bg_design_for(spec: CandidateSpec, data: AlignedDataset,
                   estimate: ECEstimate, thresholds: Thresholds) -> np.ndarray:
    if spec.form == "differences":
        X, _, _ = difference_design(spec, data)
        return X
    if not spec.phi_free:
        X, _ = levels_design(spec, data, drop_first=True)
        return X
    if thresholds.bg_design == "jacobian":
        _, J = ec_residuals_and_jacobian(spec, data, estimate.coefficients)
        return -J
    # 'regressors' variant: the linear columns of the EC regression
    y = data.column(data.target)
    cols = [np.diff(data.column(nm)) for nm in spec.subset]
    cols += [data.column(nm)[:-1] for nm in spec.subset]
    cols.append(y[:-1])
    n = cols[0].shape[0]
    if spec.deterministic in ("constant", "constant_and_trend"):
        cols.append(np.ones(n))
    if spec.deterministic == "constant_and_trend":
        cols.append(np.arange(2.0, n + 2.0))
    return np.column_stack(cols)


def check_candidate(spec: CandidateSpec, data: AlignedDataset,
                    thresholds: Thresholds | None = None,
                    nls_options: NlsOptions | None = None,
                    screen: EgScreenResult | None = None) -> CandidateOutcome:
    """Full pipeline for one candidate.

    Level form: EG screen (pass ``screen`` to share one screen between
    phi twins), then EC estimation, then the BG LM filter.  Difference
    form: OLS plus the BG LM filter.  Estimation failures discard the
    candidate with reason 'error' rather than raising.
    """
    thresholds = thresholds or Thresholds()

    if spec.form == "levels":
        if screen is None:
            screen = eg_step1(spec, data, thresholds.eg_level,
                              thresholds.eg_augment_lags)
        if screen.failure is not None:
            return _discard(spec, "eg", screen.failure, screen)
        if not screen.cointegrated:
            return _discard(
                spec, "eg",
                f"residual DF {screen.statistic:.3f} not below "
                f"{screen.critical_value:.3f}", screen)
        try:
            estimate = nls_ec_fit(spec, data, nls_options)
        except CointsearchError as exc:
            return _discard(spec, "error", f"EC estimation failed: {exc}", screen)
        if not estimate.converged:
            return _discard(spec, "error",
                            f"NLS did not converge in {estimate.iterations} "
                            f"iterations", screen, estimate)
    else:
        screen = None
        try:
            estimate = difference_ols(spec, data)
        except CointsearchError as exc:
            return _discard(spec, "error", f"OLS estimation failed: {exc}")

    try:
        design = _bg_design_for(spec, data, estimate, thresholds)
        bg = bg_lm_test(estimate.residuals, design, thresholds.bglm_lags)
    except (CointsearchError, ValueError) as exc:
        return _discard(spec, "error", f"BG LM test failed: {exc}",
                        screen, estimate)
    if bg.p_value <= thresholds.bglm_level:
        return _discard(spec, "bglm",
                        f"BG LM p-value {bg.p_value:.4f} <= "
                        f"{thresholds.bglm_level}", screen, estimate, bg)
    return CandidateOutcome(spec, True, None, None, screen, estimate, bg)
