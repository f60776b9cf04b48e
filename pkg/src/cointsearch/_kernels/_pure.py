"""Pure NumPy implementations of the Monte-Carlo-hot statistic kernels.

Signatures and numeric conventions mirror the compiled extension
``cointsearch._kernels._core`` exactly; the dispatcher in
``cointsearch._kernels`` picks whichever is available.  Degenerate inputs
are signalled with NaN / negative sentinels, never exceptions, so the
kernels stay exception-free for tight loops; callers translate.
"""

from __future__ import annotations

import numpy as np

CASE_NONE = 0
CASE_CONST = 1
CASE_TREND = 2


def _design(y: np.ndarray, case: int, lags: int, start: int):
    """ADF regression pieces for rows ``start .. len(dy)-1`` of the
    difference series.  Column 0 is the lagged level; its t-ratio is the
    DF statistic."""
    dy = y[1:] - y[:-1]
    m = dy.shape[0]
    nobs = m - start
    cols = [y[start:m]]
    for j in range(1, lags + 1):
        cols.append(dy[start - j:m - j])
    if case >= CASE_CONST:
        cols.append(np.ones(nobs))
    if case >= CASE_TREND:
        cols.append(np.arange(nobs, dtype=float))
    X = np.column_stack(cols)
    return X, dy[start:m], nobs


def _tstat_ssr(X: np.ndarray, z: np.ndarray):
    """Normal-equation OLS; returns (t-stat of column 0, SSR).

    Columns are RMS-scaled internally (t-ratios are scale invariant) to
    keep the Gram matrix well conditioned.  Returns (nan, nan) when the
    scaled Gram matrix is not positive definite.
    """
    scale = np.sqrt(np.mean(X * X, axis=0))
    scale[scale == 0.0] = 1.0
    Xs = X / scale
    G = Xs.T @ Xs
    b1 = Xs.T @ z
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        return np.nan, np.nan
    beta = _cho_solve(L, b1)
    resid = z - Xs @ beta
    ssr = float(resid @ resid)
    nobs, k = Xs.shape
    if nobs <= k:
        return np.nan, ssr
    s2 = ssr / (nobs - k)
    e0 = np.zeros(k)
    e0[0] = 1.0
    g00 = float(_cho_solve(L, e0)[0])
    if s2 * g00 <= 0.0:
        return np.nan, ssr
    return float(beta[0] / np.sqrt(s2 * g00)), ssr


def _cho_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    u = np.linalg.solve(L, b)
    return np.linalg.solve(L.T, u)


def adf_tstat(y: np.ndarray, case: int, lags: int):
    """DF/ADF t-statistic at a fixed lag order.

    Returns ``(stat, nobs)``; ``stat`` is NaN for degenerate input.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n - 1 - lags <= lags + 3 + case:
        return np.nan, 0
    X, z, nobs = _design(y, case, lags, lags)
    stat, _ = _tstat_ssr(X, z)
    return stat, nobs


def adf_best_lag(y: np.ndarray, case: int, max_lag: int) -> int:
    """BIC lag selection over 0..max_lag, all fit on the common sample
    that the max_lag regression uses.  Ties go to the smaller lag."""
    y = np.asarray(y, dtype=float)
    best_lag = 0
    best_bic = np.inf
    for p in range(max_lag + 1):
        X, z, nobs = _design(y, case, p, max_lag)
        if nobs <= X.shape[1]:
            continue
        _, ssr = _tstat_ssr(X, z)
        if not np.isfinite(ssr) or ssr <= 0.0:
            continue
        bic = nobs * np.log(ssr / nobs) + X.shape[1] * np.log(nobs)
        if bic < best_bic:
            best_bic = bic
            best_lag = p
    return best_lag


def kpss_statistic(e: np.ndarray, bandwidth: int) -> float:
    """KPSS LM statistic from detrending residuals and a Bartlett-kernel
    long-run variance with the given truncation lag."""
    e = np.asarray(e, dtype=float)
    n = e.shape[0]
    s2 = float(e @ e) / n
    for h in range(1, bandwidth + 1):
        gamma = float(e[h:] @ e[:-h]) / n
        s2 += 2.0 * (1.0 - h / (bandwidth + 1.0)) * gamma
    if s2 <= 0.0:
        return np.nan
    partial = np.cumsum(e)
    return float(partial @ partial) / (n * n * s2)


def nw_bandwidth(e: np.ndarray) -> int:
    """Newey-West (1994) automatic Bartlett bandwidth; -1 for degenerate
    (zero variance) input."""
    e = np.asarray(e, dtype=float)
    n = e.shape[0]
    gamma0 = float(e @ e) / n
    if gamma0 <= 0.0:
        return -1
    pilot = int(np.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))
    pilot = min(pilot, n - 1)
    s0 = gamma0
    s1 = 0.0
    for j in range(1, pilot + 1):
        gamma = float(e[j:] @ e[:-j]) / n
        s0 += 2.0 * gamma
        s1 += 2.0 * j * gamma
    if s0 == 0.0:
        return n - 1
    bw = int(np.floor(1.1447 * abs(s1 / s0) ** (2.0 / 3.0) * n ** (1.0 / 3.0)))
    return min(bw, n - 1)
