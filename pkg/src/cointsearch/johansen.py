"""Johansen VEC rank tests and the EC-term consistency check.

The VEC is the minimal lag-1 form: differences regressed on the lagged
levels augmented with the restricted deterministic term.  Two cases are
supported: a constant restricted to the EC term, and a trend restricted
to the EC term with an unrestricted drift (projected out before the
eigenproblem).  Critical values and p-values come from the Monte Carlo
quantile table in ``cointsearch/tables/johansen_asymptotic_v1.txt``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import (
    EstimationError,
    InsufficientDataError,
    NoCointegrationSpaceError,
    UnsupportedDimensionError,
)
from .regress import ECEstimate
from .series import AlignedDataset
from .specs import CandidateSpec

__all__ = ["VecResult", "ConsistencyResult", "johansen_test", "ec_consistency",
           "RESTRICTED_CONSTANT", "RESTRICTED_TREND"]

RESTRICTED_CONSTANT = "restricted_constant"
RESTRICTED_TREND = "restricted_trend_with_drift"
_CASES = (RESTRICTED_CONSTANT, RESTRICTED_TREND)

_SPEC_TO_CASE = {"constant": RESTRICTED_CONSTANT,
                 "constant_and_trend": RESTRICTED_TREND}


@lru_cache(maxsize=1)
def _johansen_tables() -> dict:
    text = resources.files("cointsearch.tables").joinpath(
        "johansen_asymptotic_v1.txt").read_text()
    grids: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, case, stat, m, level, value = line.split()
        if kind != "quantile":
            raise ValueError(f"unknown row kind {kind!r} in Johansen table")
        grids.setdefault((case, stat, int(m)), []).append(
            (float(level), float(value)))
    out = {}
    for key, rows in grids.items():
        rows.sort()
        out[key] = (np.array([r[0] for r in rows]),
                    np.array([r[1] for r in rows]))
    return out


def _grid(case: str, stat: str, m: int):
    try:
        return _johansen_tables()[(case, stat, m)]
    except KeyError:
        raise UnsupportedDimensionError(
            f"no asymptotic table for case={case}, stat={stat}, m={m}"
        ) from None


def critical_value(case: str, stat: str, m: int, level: float = 0.05) -> float:
    """Asymptotic critical value at test level ``level``."""
    cdf, q = _grid(case, stat, m)
    i = np.flatnonzero(np.isclose(cdf, 1.0 - level))
    if i.size == 0:
        raise ValueError(f"level {level} not tabulated")
    return float(q[i[0]])


def asymptotic_pvalue(case: str, stat: str, m: int, x: float) -> float:
    """Upper-tail probability from the quantile grid, interpolated in the
    statistic with an exponential extrapolation beyond the last point."""
    cdf, q = _grid(case, stat, m)
    x = float(x)
    if x <= 0.0:
        return 1.0
    if x < q[0]:
        return 1.0 - cdf[0] * x / q[0]
    if x > q[-1]:
        tau = (q[-1] - q[-2]) / np.log((1.0 - cdf[-2]) / (1.0 - cdf[-1]))
        return float((1.0 - cdf[-1]) * np.exp(-(x - q[-1]) / tau))
    return float(1.0 - np.interp(x, q, cdf))


@dataclass(frozen=True)
class VecResult:
    """Reduced-rank regression output of the lag-1 VEC."""

    dimension: int
    case: str
    variables: tuple[str, ...]
    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    max_eig_stats: np.ndarray
    trace_pvalues: np.ndarray
    max_eig_pvalues: np.ndarray
    trace_critical_values: np.ndarray
    max_eig_critical_values: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    beta_augmented: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray | None
    delta_prime: np.ndarray | None
    omega: np.ndarray
    selected_rank: int
    selected_rank_max_eig: int
    full_rank_indicated: bool
    level: float
    n_obs: int


def _select_rank(stats: np.ndarray, cvs: np.ndarray, d: int) -> tuple[int, bool]:
    """Sequential testing: smallest r whose null is not rejected.  The VEC
    model class presumes at least one common trend, so the reported rank
    is capped at d-1; ``full`` marks the all-ranks-rejected outcome."""
    for r in range(d):
        if stats[r] < cvs[r]:
            return r, False
    return d - 1, True


def johansen_test(data: AlignedDataset, case: str = RESTRICTED_CONSTANT,
                  level: float = 0.05,
                  columns: tuple[str, ...] | None = None,
                  extra_diff_lags: int = 0) -> VecResult:
    """Johansen trace / max-eigenvalue rank tests on the dataset columns.

    The system vector follows the dataset column order (or ``columns``
    when given).  The default VEC has no short-run difference terms;
    ``extra_diff_lags`` adds that many lagged-difference blocks as
    unrestricted regressors (partialled out before the eigenproblem).
    Rank selection runs the sequential trace test at ``level``; the
    max-eigenvalue selection is reported alongside.
    """
    if case not in _CASES:
        raise ValueError(f"case must be one of {_CASES}")
    if extra_diff_lags < 0:
        raise ValueError("extra_diff_lags must be nonnegative")
    names = tuple(columns) if columns is not None else tuple(data.columns)
    Z = np.column_stack([data.column(nm) for nm in names])
    n, d = Z.shape
    if not 2 <= d <= 6:
        raise UnsupportedDimensionError(
            f"Johansen tables cover dimensions 2..6, got {d}")
    if n < 5 * d + extra_diff_lags * d:
        raise InsufficientDataError(
            f"Johansen test needs at least {5 * d + extra_diff_lags * d} "
            f"observations, got {n}")

    dZ_full = np.diff(Z, axis=0)
    p = extra_diff_lags
    dZ = dZ_full[p:]
    T = dZ.shape[0]
    if case == RESTRICTED_CONSTANT:
        w = np.column_stack([Z[p:-1], np.ones(T)])
        unrestricted = [dZ_full[p - j:-j] for j in range(1, p + 1)]
    else:
        w = np.column_stack([Z[p:-1], np.arange(2.0 + p, n + 1.0)])
        unrestricted = [np.ones((T, 1))]
        unrestricted += [dZ_full[p - j:-j] for j in range(1, p + 1)]
    if unrestricted:
        U = np.column_stack(unrestricted)
        proj = U @ np.linalg.lstsq(U, np.column_stack([dZ, w]), rcond=None)[0]
        R0 = dZ - proj[:, :d]
        R1 = w - proj[:, d:]
    else:
        R0, R1 = dZ, w

    S00 = R0.T @ R0 / T
    S11 = R1.T @ R1 / T
    S01 = R0.T @ R1 / T
    try:
        L00 = np.linalg.cholesky(S00)
        L11 = np.linalg.cholesky(S11)
    except np.linalg.LinAlgError:
        raise EstimationError(
            "near-singular moment matrices in the Johansen regression"
        ) from None
    # M = L11^{-1} S10 S00^{-1} S01 L11^{-T}; eig of M are the squared
    # canonical correlations.
    A = np.linalg.solve(L00, S01)          # L00^{-1} S01
    B = np.linalg.solve(L11, A.T)          # L11^{-1} S10 L00^{-T}
    M = B @ B.T
    lam_all, V = np.linalg.eigh(M)
    order = np.argsort(lam_all)[::-1]
    lam_all = lam_all[order]
    V = V[:, order]
    vec_all = np.linalg.solve(L11.T, V)    # columns satisfy v' S11 v = 1

    lam = np.clip(lam_all[:d], 0.0, None)
    if np.any(lam >= 1.0):
        raise EstimationError("canonical correlation reached one; "
                              "the system is numerically degenerate")

    log1m = np.log(1.0 - lam)
    trace = np.array([-T * log1m[r:].sum() for r in range(d)])
    maxeig = -T * log1m

    stat_m = np.array([d - r for r in range(d)])
    trace_cv = np.array([critical_value(case, "trace", m, level)
                         for m in stat_m])
    maxeig_cv = np.array([critical_value(case, "max_eig", m, level)
                          for m in stat_m])
    trace_p = np.array([asymptotic_pvalue(case, "trace", m, s)
                        for m, s in zip(stat_m, trace)])
    maxeig_p = np.array([asymptotic_pvalue(case, "max_eig", m, s)
                         for m, s in zip(stat_m, maxeig)])

    r_trace, full = _select_rank(trace, trace_cv, d)
    r_maxeig, _ = _select_rank(maxeig, maxeig_cv, d)
    r = r_trace

    beta_aug = vec_all[:, :r]
    beta = beta_aug[:d]
    alpha = S01 @ beta_aug
    omega = S00 - alpha @ alpha.T
    omega = 0.5 * (omega + omega.T)

    if case == RESTRICTED_CONSTANT:
        gamma = beta_aug[d].copy()
        delta = None
        delta_prime = None
    else:
        delta = beta_aug[d].copy()
        # coefficient of the unrestricted constant given the EC term
        ec_removed = dZ - w @ (beta_aug @ alpha.T)
        mu0 = np.linalg.lstsq(U, ec_removed, rcond=None)[0][0]
        if r:
            gamma = np.linalg.lstsq(alpha, mu0, rcond=None)[0]
        else:
            gamma = np.zeros(0)
        # orthogonal complement of alpha from the SVD's trailing vectors
        if r:
            U, _, _ = np.linalg.svd(alpha, full_matrices=True)
            alpha_perp = U[:, r:]
        else:
            alpha_perp = np.eye(d)
        delta_prime = alpha_perp.T @ mu0

    return VecResult(
        dimension=d,
        case=case,
        variables=names,
        eigenvalues=lam,
        trace_stats=trace,
        max_eig_stats=maxeig,
        trace_pvalues=trace_p,
        max_eig_pvalues=maxeig_p,
        trace_critical_values=trace_cv,
        max_eig_critical_values=maxeig_cv,
        alpha=alpha,
        beta=beta,
        beta_augmented=beta_aug,
        gamma=gamma,
        delta=delta,
        delta_prime=delta_prime,
        omega=omega,
        selected_rank=r,
        selected_rank_max_eig=r_maxeig,
        full_rank_indicated=full,
        level=level,
        n_obs=n,
    )


@dataclass(frozen=True)
class ConsistencyResult:
    """Least-squares combination of the cointegration space matched
    against one EC model's error-correction term."""

    xi: np.ndarray
    reconstructed_ec: np.ndarray
    target_ec: np.ndarray
    coordinates: tuple[str, ...]
    bounds: np.ndarray
    within_bounds: bool


def ec_consistency(vec: VecResult, ec: ECEstimate,
                   ec_spec: CandidateSpec,
                   target: str | None = None) -> ConsistencyResult:
    """Check whether the EC term of a fitted candidate lies in the span of
    the Johansen cointegration space.

    Solves least squares for xi with the target-variable coordinate
    pinned to one by normalization; ``within_bounds`` holds when every
    reconstructed coefficient lies within one standard error of the
    corresponding EC estimate.  The target defaults to the first system
    variable.
    """
    if target is None:
        target = vec.variables[0]
    if vec.selected_rank == 0:
        raise NoCointegrationSpaceError(
            "the VEC fit selected rank zero; no space to check against")
    expected_case = _SPEC_TO_CASE.get(ec_spec.deterministic)
    if expected_case != vec.case:
        raise ValueError(
            f"candidate deterministic terms {ec_spec.deterministic!r} do not "
            f"match VEC case {vec.case!r}")
    if set(vec.variables) != {target, *ec_spec.subset}:
        raise ValueError("VEC and EC model must cover the same variable set")

    d = vec.dimension
    names = list(vec.variables)
    coords = names + ["const"]
    rows = [vec.beta, vec.gamma[None, :]]
    if vec.case == RESTRICTED_TREND:
        coords.append("trend")
        rows.append(vec.delta[None, :])
    M = np.vstack(rows)

    se = ec.standard_errors()
    v = np.zeros(len(coords))
    bounds = np.zeros(len(coords))
    y_idx = names.index(target)
    v[y_idx] = 1.0
    for i, nm in enumerate(names):
        if nm == target:
            continue
        v[i] = -ec.betas[nm]
        bounds[i] = se[nm]
    v[d] = -(ec.constant if ec.constant is not None else 0.0)
    bounds[d] = se.get("const", 0.0)
    if vec.case == RESTRICTED_TREND:
        v[d + 1] = -(ec.trend if ec.trend is not None else 0.0)
        bounds[d + 1] = se.get("trend", 0.0)

    # Equality-constrained least squares via the KKT system:
    # min ||M xi - v||^2  subject to  (M xi)[y] = 1.
    r = M.shape[1]
    a = M[y_idx]
    kkt = np.zeros((r + 1, r + 1))
    kkt[:r, :r] = 2.0 * M.T @ M
    kkt[:r, r] = a
    kkt[r, :r] = a
    rhs = np.concatenate([2.0 * M.T @ v, [1.0]])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    xi = sol[:r]
    recon = M @ xi

    feasible = abs(recon[y_idx] - 1.0) <= 1e-8 * max(1.0, np.abs(recon).max())
    deviation = np.abs(recon - v)
    checked = bounds > 0.0
    within = bool(feasible and np.all(deviation[checked] <= bounds[checked]))
    return ConsistencyResult(
        xi=xi,
        reconstructed_ec=recon,
        target_ec=v,
        coordinates=tuple(coords),
        bounds=bounds,
        within_bounds=within,
    )
