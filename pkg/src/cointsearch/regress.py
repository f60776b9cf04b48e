"""OLS and Levenberg-Marquardt NLS estimation of error-correction models.

The level relation ``y_t = sum_i beta_i x_it [+ c + delta*t] + eta_t`` with
AR(1) noise ``eta_t = eps_t / (1 - phi L)`` is estimated in its
error-correction rearrangement

    dy_t = sum_i beta_i dx_it + (phi - 1) * B_t + delta * phi + eps_t,
    B_t  = y_{t-1} - sum_i beta_i x_i,t-1 - c - delta * t,

which is nonlinear in (beta, c, delta, phi).  With phi restricted to zero
the rearrangement collapses to the plain levels regression, so restricted
candidates are estimated by OLS on the same sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, TYPE_CHECKING

import numpy as np

from .errors import (
    DegreesOfFreedomError,
    EstimationError,
    InsufficientDataError,
    SingularDesignError,
)
from .series import AlignedDataset

if TYPE_CHECKING:
    from .specs import CandidateSpec

__all__ = ["OlsEstimate", "ECEstimate", "NlsOptions", "ols_fit", "nls_ec_fit",
           "difference_ols", "ec_residuals_and_jacobian"]

MAX_CONDITION = 1e12


def guarded_t_ratios(coefficients: np.ndarray, covariance: np.ndarray) -> np.ndarray:
    """coef / sqrt(var), with zero-variance entries mapped to +-inf (or 0
    for a zero coefficient) instead of overflowing."""
    var = np.diag(covariance).copy()
    out = np.empty_like(var)
    ok = var > 0.0
    out[ok] = coefficients[ok] / np.sqrt(var[ok])
    out[~ok] = np.where(coefficients[~ok] == 0.0, 0.0,
                        np.sign(coefficients[~ok]) * np.inf)
    return out


@dataclass(frozen=True)
class OlsEstimate:
    """Least-squares fit with Gaussian covariance ``s^2 (X'X)^{-1}``."""

    coefficients: np.ndarray
    covariance: np.ndarray
    t_ratios: np.ndarray
    residuals: np.ndarray
    ssr: float
    n_obs: int
    n_params: int


def ols_fit(design: np.ndarray, target: np.ndarray) -> OlsEstimate:
    """OLS via SVD with an explicit conditioning guard.

    Raises :class:`DegreesOfFreedomError` when rows <= columns and
    :class:`SingularDesignError` when the design's condition number
    exceeds ``1e12``.
    """
    X = np.asarray(design, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(target, dtype=float).ravel()
    n, k = X.shape
    if y.shape[0] != n:
        raise ValueError("design and target lengths differ")
    if n <= k:
        raise DegreesOfFreedomError(f"{n} observations for {k} parameters")
    scale = np.sqrt(np.mean(X * X, axis=0))
    scale[scale == 0.0] = 1.0
    U, s, Vt = np.linalg.svd(X / scale, full_matrices=False)
    if s[-1] <= 0.0 or s[0] / s[-1] > MAX_CONDITION:
        raise SingularDesignError(
            f"design condition number {np.inf if s[-1] <= 0 else s[0] / s[-1]:.3g} "
            f"exceeds {MAX_CONDITION:.0e}"
        )
    beta_scaled = Vt.T @ ((U.T @ y) / s)
    beta = beta_scaled / scale
    resid = y - X @ beta
    ssr = float(resid @ resid)
    s2 = ssr / (n - k)
    xtx_inv = (Vt.T / (s * s)) @ Vt / np.outer(scale, scale)
    cov = s2 * xtx_inv
    cov = 0.5 * (cov + cov.T)
    return OlsEstimate(
        coefficients=beta,
        covariance=cov,
        t_ratios=guarded_t_ratios(beta, cov),
        residuals=resid,
        ssr=ssr,
        n_obs=n,
        n_params=k,
    )


@dataclass(frozen=True)
class NlsOptions:
    """Marquardt settings: stop when the largest relative coefficient
    change drops below ``tol``, give up after ``max_iter`` iterations."""

    tol: float = 1e-4
    max_iter: int = 500
    initial_lambda: float = 1e-3

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.initial_lambda <= 0.0:
            raise ValueError("initial_lambda must be positive")


@dataclass(frozen=True)
class ECEstimate:
    """Fitted error-correction model for one candidate."""

    spec_id: str
    param_names: tuple[str, ...]
    betas: Mapping[str, float]
    constant: float | None
    trend: float | None
    phi: float | None
    covariance: np.ndarray
    t_ratios: Mapping[str, float]
    residuals: np.ndarray
    ssr: float
    n_obs: int
    n_params: int
    converged: bool
    iterations: int
    phi_stationary: bool = True

    @property
    def coefficients(self) -> np.ndarray:
        vals = dict(self.betas)
        if self.constant is not None:
            vals["const"] = self.constant
        if self.trend is not None:
            vals["trend"] = self.trend
        if self.phi is not None:
            vals["phi"] = self.phi
        return np.array([vals[p] for p in self.param_names])

    def standard_errors(self) -> Mapping[str, float]:
        se = np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))
        return dict(zip(self.param_names, se))


def levels_design(spec: "CandidateSpec", data: AlignedDataset,
                  drop_first: bool = False) -> tuple[np.ndarray, list[str]]:
    """Design matrix of the levels regression (predictors plus
    deterministic columns)."""
    return _levels_design(spec, data, slice(1, None) if drop_first else slice(None))


def _levels_design(spec: "CandidateSpec", data: AlignedDataset,
                   rows: slice) -> tuple[np.ndarray, list[str]]:
    n = len(data)
    trend = np.arange(1.0, n + 1.0)
    cols = [data.column(name) for name in spec.subset]
    names = list(spec.subset)
    if spec.deterministic in ("constant", "constant_and_trend"):
        cols.append(np.ones(n))
        names.append("const")
    if spec.deterministic == "constant_and_trend":
        cols.append(trend)
        names.append("trend")
    X = np.column_stack(cols)[rows]
    return X, names


def levels_ols(spec: "CandidateSpec", data: AlignedDataset,
               drop_first: bool = False) -> tuple[OlsEstimate, list[str]]:
    """OLS of the target on the candidate's predictors and deterministic
    terms.  ``drop_first=True`` discards the first observation so that the
    fit shares the error-correction sample."""
    rows = slice(1, None) if drop_first else slice(None)
    X, names = _levels_design(spec, data, rows)
    y = data.column(data.target)[rows]
    if X.shape[0] < X.shape[1] + 2:
        raise InsufficientDataError(
            f"{X.shape[0]} observations cannot support {X.shape[1]} parameters"
        )
    return ols_fit(X, y), names


@dataclass(frozen=True)
class _ECArrays:
    """Error-correction sample pieces (one observation lost to the lag)."""

    dy: np.ndarray
    dx: np.ndarray       # (n-1, k) differenced predictors
    xlag: np.ndarray     # (n-1, k) lagged predictor levels
    ylag: np.ndarray
    trend: np.ndarray    # trend value at the current observation
    names: tuple[str, ...]
    has_const: bool
    has_trend: bool


def _ec_arrays(spec: "CandidateSpec", data: AlignedDataset) -> _ECArrays:
    y = data.column(data.target)
    n = y.shape[0]
    k = len(spec.subset)
    if n < spec.n_params + 3:
        raise InsufficientDataError(
            f"{n} observations cannot support an EC fit with "
            f"{spec.n_params} parameters"
        )
    X = (np.column_stack([data.column(name) for name in spec.subset])
         if k else np.empty((n, 0)))
    trend = np.arange(1.0, n + 1.0)
    return _ECArrays(
        dy=np.diff(y),
        dx=np.diff(X, axis=0),
        xlag=X[:-1],
        ylag=y[:-1],
        trend=trend[1:],
        names=tuple(spec.subset),
        has_const=spec.deterministic in ("constant", "constant_and_trend"),
        has_trend=spec.deterministic == "constant_and_trend",
    )


def _ec_resid_jac(theta: np.ndarray, a: _ECArrays, trend_scale: float = 1.0):
    """Residuals and analytic Jacobian of the EC regression.

    Parameter layout: betas (len(a.names)), then constant and trend when
    present, then phi.  ``trend_scale`` carries the 1/s_t factor of the
    internally rescaled trend into the ``delta*phi`` intercept term.
    """
    k = len(a.names)
    pos = k
    betas = theta[:k]
    const = 0.0
    delta = 0.0
    if a.has_const:
        const = theta[pos]
        pos += 1
    if a.has_trend:
        delta = theta[pos]
        pos += 1
    phi = theta[pos]

    bracket = a.ylag - a.xlag @ betas - const - delta * a.trend
    r = (a.dy - a.dx @ betas - (phi - 1.0) * bracket
         - delta * phi * trend_scale)

    n = r.shape[0]
    J = np.empty((n, pos + 1))
    J[:, :k] = -a.dx + (phi - 1.0) * a.xlag
    col = k
    if a.has_const:
        J[:, col] = phi - 1.0
        col += 1
    if a.has_trend:
        J[:, col] = (phi - 1.0) * a.trend - phi * trend_scale
        col += 1
    J[:, col] = -bracket - delta * trend_scale
    return r, J


def ec_residuals_and_jacobian(spec: "CandidateSpec", data: AlignedDataset,
                              params: np.ndarray):
    """Unscaled EC residual vector and Jacobian at ``params``; exposed for
    derivative verification."""
    if not spec.phi_free:
        raise ValueError("EC residual surface is defined for phi-free specs")
    return _ec_resid_jac(np.asarray(params, dtype=float), _ec_arrays(spec, data))


def _wrap_ols_as_ec(spec: "CandidateSpec", fit: OlsEstimate,
                    names: Sequence[str]) -> ECEstimate:
    named = dict(zip(names, fit.coefficients))
    tr = dict(zip(names, fit.t_ratios))
    return ECEstimate(
        spec_id=spec.id,
        param_names=tuple(names),
        betas={n: named[n] for n in spec.subset},
        constant=named.get("const"),
        trend=named.get("trend"),
        phi=None,
        covariance=fit.covariance,
        t_ratios=tr,
        residuals=fit.residuals,
        ssr=fit.ssr,
        n_obs=fit.n_obs,
        n_params=fit.n_params,
        converged=True,
        iterations=0,
    )


def difference_design(spec: "CandidateSpec", data: AlignedDataset
                      ) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Design matrix and target for a short-run (first-difference) model."""
    dy = np.diff(data.column(data.target))
    cols = [np.diff(data.column(name)) for name in spec.subset]
    names = list(spec.subset)
    if spec.deterministic == "constant":
        cols.append(np.ones(dy.shape[0]))
        names.append("const")
    X = np.column_stack(cols) if cols else np.empty((dy.shape[0], 0))
    return X, dy, names


def difference_ols(spec: "CandidateSpec", data: AlignedDataset) -> ECEstimate:
    """OLS fit of a short-run candidate, wrapped in the common estimate type."""
    if spec.form != "differences":
        raise ValueError("difference_ols applies to difference-form candidates")
    X, dy, names = difference_design(spec, data)
    if X.shape[0] < X.shape[1] + 2:
        raise InsufficientDataError(
            f"{X.shape[0]} differenced observations cannot support "
            f"{X.shape[1]} parameters")
    return _wrap_ols_as_ec(spec, ols_fit(X, dy), names)


def nls_ec_fit(spec: "CandidateSpec", data: AlignedDataset,
               options: NlsOptions | None = None,
               ssr_trace: list | None = None) -> ECEstimate:
    """Estimate a level-form candidate in error-correction form.

    phi-free candidates are fitted by Marquardt NLS with the analytic
    Jacobian, warm-started from the step-1 levels OLS fit (phi from the
    lag-1 autocorrelation of its residuals).  phi-restricted candidates
    reduce to OLS on the same one-observation-shortened sample.
    Non-convergence is reported through ``converged``, not raised.
    ``ssr_trace``, when given, collects the objective after every
    accepted Marquardt step.
    """
    if spec.form != "levels":
        raise ValueError("EC estimation applies to level-form candidates")
    options = options or NlsOptions()

    if not spec.phi_free:
        fit, names = levels_ols(spec, data, drop_first=True)
        return _wrap_ols_as_ec(spec, fit, names)

    a = _ec_arrays(spec, data)
    warm, names = levels_ols(spec, data, drop_first=False)
    resid0 = warm.residuals
    denom = float(resid0 @ resid0)
    phi0 = 0.0 if denom <= 0.0 else float(resid0[1:] @ resid0[:-1]) / denom
    phi0 = float(np.clip(phi0, -0.99, 0.99))

    # Internal rescaling: predictors and trend to unit RMS; estimates are
    # reported in original units afterwards.
    k = len(a.names)
    col_scale = np.ones(k)
    for j in range(k):
        rms = float(np.sqrt(np.mean(a.xlag[:, j] ** 2)))
        col_scale[j] = rms if rms > 0.0 else 1.0
    t_rms = float(np.sqrt(np.mean(a.trend ** 2)))
    trend_scale = 1.0 / t_rms if a.has_trend else 1.0

    scaled = _ECArrays(
        dy=a.dy,
        dx=a.dx / col_scale,
        xlag=a.xlag / col_scale,
        ylag=a.ylag,
        trend=a.trend * trend_scale,
        names=a.names,
        has_const=a.has_const,
        has_trend=a.has_trend,
    )
    unscale = np.ones(k + spec.det_terms + 1)
    unscale[:k] = 1.0 / col_scale
    if a.has_trend:
        unscale[k + 1] = trend_scale

    theta = np.concatenate([warm.coefficients / unscale[:-1], [phi0]])
    param_names = tuple(names) + ("phi",)

    r, J = _ec_resid_jac(theta, scaled, trend_scale)
    ssr = float(r @ r)
    if ssr_trace is not None:
        ssr_trace.append(ssr)
    lam = options.initial_lambda
    converged = False
    iterations = 0
    while iterations < options.max_iter:
        iterations += 1
        G = J.T @ J
        g = J.T @ r
        D = np.diag(G).copy()
        if not np.all(np.isfinite(G)) or np.all(D <= 0.0):
            raise EstimationError(f"singular Jacobian for {spec.id}")
        D[D <= 0.0] = np.max(D)
        accepted = False
        while lam <= 1e12:
            try:
                L = np.linalg.cholesky(G + lam * np.diag(D))
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            step = np.linalg.solve(L.T, np.linalg.solve(L, -g))
            trial = theta + step
            r_try, J_try = _ec_resid_jac(trial, scaled, trend_scale)
            ssr_try = float(r_try @ r_try)
            if np.isfinite(ssr_try) and ssr_try < ssr:
                rel = np.abs(step) / np.maximum.reduce(
                    [np.abs(trial), np.abs(theta), np.full_like(step, 1e-8)]
                )
                theta, r, J, ssr = trial, r_try, J_try, ssr_try
                if ssr_trace is not None:
                    ssr_trace.append(ssr)
                lam = max(lam / 10.0, 1e-12)
                accepted = True
                if float(np.max(rel)) < options.tol:
                    converged = True
                break
            lam *= 10.0
        if not accepted or converged:
            break

    n, p = J.shape
    if n <= p:
        raise DegreesOfFreedomError(f"{n} EC observations for {p} parameters")
    s2 = ssr / (n - p)
    G = J.T @ J
    try:
        L = np.linalg.cholesky(G)
        ginv = np.linalg.solve(L.T, np.linalg.solve(L, np.eye(p)))
    except np.linalg.LinAlgError:
        ginv = np.linalg.pinv(G)
    cov = s2 * ginv
    cov = unscale[:, None] * cov * unscale[None, :]
    cov = 0.5 * (cov + cov.T)

    coef = theta * unscale
    tvals = guarded_t_ratios(coef, cov)
    named = dict(zip(param_names, coef))
    phi = named["phi"]
    return ECEstimate(
        spec_id=spec.id,
        param_names=param_names,
        betas={nm: named[nm] for nm in spec.subset},
        constant=named.get("const"),
        trend=named.get("trend"),
        phi=phi,
        covariance=cov,
        t_ratios=dict(zip(param_names, tvals)),
        residuals=r,
        ssr=ssr,
        n_obs=n,
        n_params=p,
        converged=converged,
        iterations=iterations,
        phi_stationary=bool(abs(phi) < 1.0),
    )
