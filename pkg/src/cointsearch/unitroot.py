"""ADF and KPSS pretests plus Dickey-Fuller p-values and critical values.

The DF/EG distributions come from the response-surface table shipped in
``cointsearch/tables/df_surface_v1.txt`` (published MacKinnon coefficients
where available, seeded Monte Carlo fits elsewhere; see the file header
for schema and provenance).  KPSS uses the published asymptotic
critical-value table, reported as a probability bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.stats import norm

from . import _kernels as kernels
from .errors import (
    DegenerateSeriesError,
    InsufficientDataError,
    UnsupportedDimensionError,
)
from .series import TimeSeries

__all__ = [
    "UnitRootResult",
    "KpssResult",
    "adf_test",
    "df_pvalue",
    "eg_critical_value",
    "kpss_test",
    "nw_bandwidth",
    "default_max_lag",
]

CASES = ("none", "constant", "constant_and_trend")
_CASE_CODE = {"none": 0, "constant": 1, "constant_and_trend": 2}
CRIT_LEVELS = (0.01, 0.05, 0.10)

# Asymptotic KPSS critical values, (level, value), level-stationary and
# trend-stationary variants.
_KPSS_CRIT = {
    "constant": ((0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739)),
    "constant_and_trend": ((0.10, 0.119), (0.05, 0.146), (0.025, 0.176),
                           (0.01, 0.216)),
}


def _check_case(case: str, allowed=CASES) -> str:
    if case not in allowed:
        raise ValueError(f"deterministic case must be one of {allowed}, got {case!r}")
    return case


@lru_cache(maxsize=1)
def _df_tables():
    crit: dict = {}
    pval: dict = {}
    bounds: dict = {}
    text = resources.files("cointsearch.tables").joinpath(
        "df_surface_v1.txt").read_text()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, case, k = parts[0], parts[1], int(parts[2])
        if kind == "crit":
            level = float(parts[3])
            crit.setdefault((case, k), {})[level] = tuple(
                float(v) for v in parts[4:8])
        elif kind == "pval":
            coefs = tuple(float(v) for v in parts[4:-1])
            pval.setdefault((case, k), {})[parts[3]] = coefs
        elif kind == "bounds":
            bounds[(case, k)] = tuple(float(v) for v in parts[3:6])
        else:
            raise ValueError(f"unknown row kind {kind!r} in DF table")
    return crit, pval, bounds


def _check_regressors(n_regressors: int, minimum: int) -> int:
    k = int(n_regressors)
    if k > 6:
        raise UnsupportedDimensionError(
            f"DF tables cover at most 6 I(1) regressors, got {k}")
    if k < minimum:
        raise ValueError(f"n_regressors must be at least {minimum}")
    return k


def eg_critical_value(n_regressors: int, case: str, level: float = 0.05,
                      n: int | None = None) -> float:
    """Residual DF critical value for an Engle-Granger regression with
    ``n_regressors`` I(1) regressors; ``n=None`` selects the asymptotic
    value, otherwise the finite-sample response surface at sample size n.
    """
    _check_case(case)
    k = _check_regressors(n_regressors, minimum=1)
    crit, _, _ = _df_tables()
    try:
        b = crit[(case, k)][round(float(level), 2)]
    except KeyError:
        raise ValueError(
            f"unsupported level {level!r}; table levels are {CRIT_LEVELS}"
        ) from None
    if n is None:
        return b[0]
    if n < 20:
        raise InsufficientDataError("finite-sample surfaces need n >= 20")
    inv = 1.0 / float(n)
    return b[0] + b[1] * inv + b[2] * inv**2 + b[3] * inv**3


def _finite_sample_shift(stat: float, case: str, k: int, n: int) -> float:
    """Map a finite-sample statistic onto the asymptotic scale using the
    quantile shifts implied by the critical-value surfaces at 1/5/10%."""
    crit, _, _ = _df_tables()
    rows = crit[(case, k)]
    inv = 1.0 / float(n)
    cv_fs = []
    shift = []
    for level in sorted(rows):
        b = rows[level]
        fs = b[0] + b[1] * inv + b[2] * inv**2 + b[3] * inv**3
        cv_fs.append(fs)
        shift.append(fs - b[0])
    return stat - float(np.interp(stat, cv_fs, shift))


def df_pvalue(stat: float, case: str, n: int | None = None,
              n_regressors: int = 0) -> float:
    """Probability of a DF statistic at least as negative under the
    unit-root null.

    ``n_regressors = 0`` is the raw-series (A)DF test with the case's
    deterministic terms in the test regression; ``>= 1`` is the EG
    residual test with that many I(1) regressors (deterministic terms in
    the levels regression).  With ``n`` given, the statistic is first
    adjusted through the finite-sample critical-value surfaces; with
    ``n=None`` the asymptotic distribution applies.  Strictly monotone
    in the statistic.
    """
    _check_case(case)
    k = _check_regressors(n_regressors, minimum=0)
    _, pval, bounds = _df_tables()
    if n is not None:
        if n < 20:
            raise InsufficientDataError("finite-sample mode needs n >= 20")
        stat = _finite_sample_shift(float(stat), case, k, int(n))
    stat = float(stat)
    tau_min, tau_star, tau_max = bounds[(case, k)]
    small = pval[(case, k)]["small"]
    large = pval[(case, k)]["large"]

    def poly(coefs, x):
        return float(np.polynomial.polynomial.polyval(x, np.asarray(coefs)))

    if stat < tau_min:
        # exponential lower tail keeps the map strictly monotone
        return float(norm.cdf(poly(small, tau_min))) * float(np.exp(stat - tau_min))
    if np.isfinite(tau_max) and stat > tau_max:
        top = float(norm.cdf(poly(large, tau_max)))
        return 1.0 - (1.0 - top) * float(np.exp(tau_max - stat))
    if stat <= tau_star:
        return float(norm.cdf(poly(small, stat)))
    return float(norm.cdf(poly(large, stat)))


@dataclass(frozen=True)
class UnitRootResult:
    """ADF outcome: DF t-statistic with its unit-root p-value."""

    statistic: float
    p_value: float
    lags_used: int
    case: str
    n_obs: int


def default_max_lag(n: int) -> int:
    """Schwert rule floor(12 (n/100)^(1/4))."""
    return int(np.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(s: TimeSeries, case: str = "constant",
             max_lag: int | None = None, criterion: str = "bic"
             ) -> UnitRootResult:
    """Augmented Dickey-Fuller test with BIC lag selection.

    Lag orders 0..max_lag are compared on the common sample the max_lag
    regression uses; the selected order is then refit on its own maximal
    sample.  The p-value uses the finite-sample response surface.
    """
    _check_case(case)
    if criterion != "bic":
        raise ValueError("lag-length criterion 'bic' is the only one supported")
    values = np.asarray(s.values, dtype=float)
    n = values.shape[0]
    if np.ptp(values) == 0.0:
        raise DegenerateSeriesError(f"series {s.name!r} is constant")
    if max_lag is None:
        max_lag = max(0, min(default_max_lag(n), n - 10))
    if n < max_lag + 10:
        raise InsufficientDataError(
            f"ADF with max_lag={max_lag} needs at least {max_lag + 10} "
            f"observations, got {n}")
    case_code = _CASE_CODE[case]
    best = int(kernels.adf_best_lag(values, case_code, int(max_lag)))
    stat, nobs = kernels.adf_tstat(values, case_code, best)
    if not np.isfinite(stat):
        raise DegenerateSeriesError(
            f"degenerate ADF regression for series {s.name!r}")
    p = df_pvalue(stat, case, n=nobs, n_regressors=0)
    return UnitRootResult(statistic=float(stat), p_value=p, lags_used=best,
                          case=case, n_obs=int(nobs))


@dataclass(frozen=True)
class KpssResult:
    """KPSS outcome: LM statistic with an asymptotic probability bracket."""

    statistic: float
    p_bracket: tuple[float, float]
    bandwidth: int
    case: str


def nw_bandwidth(residuals: np.ndarray) -> int:
    """Newey-West (1994) automatic Bartlett-kernel truncation lag."""
    e = np.asarray(residuals, dtype=float)
    if e.shape[0] < 10:
        raise InsufficientDataError("bandwidth selection needs >= 10 residuals")
    bw = int(kernels.nw_bandwidth(e))
    if bw < 0:
        raise DegenerateSeriesError("zero-variance residuals")
    return bw


def kpss_test(s: TimeSeries, case: str = "constant") -> KpssResult:
    """KPSS stationarity test with the Bartlett kernel and automatic
    bandwidth; the p-value is bracketed by the asymptotic critical-value
    table (0.10 / 0.05 / 0.025 / 0.01)."""
    _check_case(case, allowed=("constant", "constant_and_trend"))
    values = np.asarray(s.values, dtype=float)
    n = values.shape[0]
    if n < 20:
        raise InsufficientDataError("KPSS needs at least 20 observations")
    if np.ptp(values) == 0.0:
        raise DegenerateSeriesError(f"series {s.name!r} is constant")
    if case == "constant":
        resid = values - values.mean()
    else:
        t = np.arange(n, dtype=float)
        X = np.column_stack([np.ones(n), t])
        beta, *_ = np.linalg.lstsq(X, values, rcond=None)
        resid = values - X @ beta
    bw = nw_bandwidth(resid)
    stat = float(kernels.kpss_statistic(resid, bw))
    if not np.isfinite(stat):
        raise DegenerateSeriesError(f"degenerate KPSS variance for {s.name!r}")
    table = _KPSS_CRIT[case]
    bracket = (table[0][0], 1.0)
    for i, (level, cv) in enumerate(table):
        if stat >= cv:
            bracket = (0.0 if i == len(table) - 1 else table[i + 1][0], level)
    return KpssResult(statistic=stat, p_bracket=bracket, bandwidth=bw, case=case)
