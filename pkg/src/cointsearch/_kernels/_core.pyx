# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statistic kernels; numeric twin of ``_pure``.

These sit inside the Monte Carlo replication loops (unit-root size and
power suites, the Engle-Granger screen) where Python call overhead
dominates, so everything is written against raw C buffers.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, floor, fabs, isfinite, log, pow, sqrt

cnp.import_array()

CASE_NONE = 0
CASE_CONST = 1
CASE_TREND = 2

DEF MAX_COLS = 40


cdef int _cholesky(double* G, int k) noexcept nogil:
    """In-place lower Cholesky of the k x k matrix G; 1 on success."""
    cdef int i, j, p
    cdef double s
    for j in range(k):
        s = G[j * k + j]
        for p in range(j):
            s -= G[j * k + p] * G[j * k + p]
        if s <= 0.0 or not isfinite(s):
            return 0
        G[j * k + j] = sqrt(s)
        for i in range(j + 1, k):
            s = G[i * k + j]
            for p in range(j):
                s -= G[i * k + p] * G[j * k + p]
            G[i * k + j] = s / G[j * k + j]
    return 1


cdef void _cho_solve(double* L, double* b, int k) noexcept nogil:
    """Solve L L' x = b in place (lower triangle of L valid)."""
    cdef int i, p
    cdef double s
    for i in range(k):
        s = b[i]
        for p in range(i):
            s -= L[i * k + p] * b[p]
        b[i] = s / L[i * k + i]
    for i in range(k - 1, -1, -1):
        s = b[i]
        for p in range(i + 1, k):
            s -= L[p * k + i] * b[p]
        b[i] = s / L[i * k + i]


cdef int _fill_design(double* y, int n, int case, int lags, int start,
                      double* X, double* z) noexcept nogil:
    """Row-major design for the ADF regression; returns nobs."""
    cdef int m = n - 1
    cdef int nobs = m - start
    cdef int k = 1 + lags + case
    cdef int i, j, c
    for i in range(nobs):
        z[i] = y[start + i + 1] - y[start + i]
        X[i * k] = y[start + i]
        c = 1
        for j in range(1, lags + 1):
            X[i * k + c] = y[start + i - j + 1] - y[start + i - j]
            c += 1
        if case >= 1:
            X[i * k + c] = 1.0
            c += 1
        if case >= 2:
            X[i * k + c] = <double> i
    return nobs


cdef int _tstat_ssr(double* X, double* z, int nobs, int k,
                    double* stat, double* ssr) noexcept nogil:
    """Normal-equation OLS with RMS column scaling; fills the t-ratio of
    column 0 and the SSR.  Returns 0 when the Gram matrix is singular."""
    cdef double scale[MAX_COLS]
    cdef double G[MAX_COLS * MAX_COLS]
    cdef double b[MAX_COLS]
    cdef double e0[MAX_COLS]
    cdef int i, j, p
    cdef double s, fit, resid2, s2
    if k > MAX_COLS:
        return 0
    for j in range(k):
        s = 0.0
        for i in range(nobs):
            s += X[i * k + j] * X[i * k + j]
        s = sqrt(s / nobs)
        scale[j] = 1.0 if s == 0.0 else s
    for i in range(nobs):
        for j in range(k):
            X[i * k + j] /= scale[j]
    for j in range(k):
        for p in range(j, k):
            s = 0.0
            for i in range(nobs):
                s += X[i * k + j] * X[i * k + p]
            G[j * k + p] = s
            G[p * k + j] = s
        s = 0.0
        for i in range(nobs):
            s += X[i * k + j] * z[i]
        b[j] = s
    if not _cholesky(G, k):
        stat[0] = NAN
        ssr[0] = NAN
        return 0
    _cho_solve(G, b, k)
    resid2 = 0.0
    for i in range(nobs):
        fit = 0.0
        for j in range(k):
            fit += X[i * k + j] * b[j]
        s = z[i] - fit
        resid2 += s * s
    ssr[0] = resid2
    if nobs <= k:
        stat[0] = NAN
        return 0
    s2 = resid2 / (nobs - k)
    for j in range(k):
        e0[j] = 0.0
    e0[0] = 1.0
    _cho_solve(G, e0, k)
    if s2 * e0[0] <= 0.0:
        stat[0] = NAN
        return 0
    stat[0] = b[0] / sqrt(s2 * e0[0])
    return 1


def adf_tstat(object y_in, int case, int lags):
    """DF/ADF t-statistic at a fixed lag order; (stat, nobs)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef int n = y.shape[0]
    cdef int nobs = n - 1 - lags
    cdef int k = 1 + lags + case
    if nobs <= k + 2:
        return float("nan"), 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] X = np.empty(nobs * k, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(nobs, dtype=np.float64)
    cdef double stat = NAN
    cdef double ssr = NAN
    _fill_design(&y[0], n, case, lags, lags, &X[0], &z[0])
    _tstat_ssr(&X[0], &z[0], nobs, k, &stat, &ssr)
    return float(stat), int(nobs)


def adf_best_lag(object y_in, int case, int max_lag):
    """BIC lag selection over 0..max_lag on the max_lag common sample."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef int n = y.shape[0]
    cdef int m = n - 1
    cdef int nobs = m - max_lag
    cdef int kmax = 1 + max_lag + case
    if nobs < 1:
        return 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] X = np.empty(nobs * kmax, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(nobs, dtype=np.float64)
    cdef int best_lag = 0
    cdef double best_bic = float("inf")
    cdef double stat, ssr, bic
    cdef int p, k
    for p in range(max_lag + 1):
        k = 1 + p + case
        if nobs <= k:
            continue
        _fill_design(&y[0], n, case, p, max_lag, &X[0], &z[0])
        _tstat_ssr(&X[0], &z[0], nobs, k, &stat, &ssr)
        if not isfinite(ssr) or ssr <= 0.0:
            continue
        bic = nobs * log(ssr / nobs) + k * log(nobs)
        if bic < best_bic:
            best_bic = bic
            best_lag = p
    return best_lag


def kpss_statistic(object e_in, int bandwidth):
    """KPSS LM statistic from residuals and a Bartlett truncation lag."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.ascontiguousarray(e_in, dtype=np.float64)
    cdef int n = e.shape[0]
    cdef int h, t
    cdef double s2 = 0.0, gamma, acc, stat
    for t in range(n):
        s2 += e[t] * e[t]
    s2 /= n
    for h in range(1, bandwidth + 1):
        gamma = 0.0
        for t in range(h, n):
            gamma += e[t] * e[t - h]
        gamma /= n
        s2 += 2.0 * (1.0 - h / (bandwidth + 1.0)) * gamma
    if s2 <= 0.0:
        return float("nan")
    acc = 0.0
    stat = 0.0
    for t in range(n):
        acc += e[t]
        stat += acc * acc
    return stat / (n * <double> n * s2)


def nw_bandwidth(object e_in):
    """Newey-West (1994) automatic Bartlett bandwidth; -1 if degenerate."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.ascontiguousarray(e_in, dtype=np.float64)
    cdef int n = e.shape[0]
    cdef int j, t, pilot, bw
    cdef double gamma0 = 0.0, gamma, s0, s1
    for t in range(n):
        gamma0 += e[t] * e[t]
    gamma0 /= n
    if gamma0 <= 0.0:
        return -1
    pilot = <int> floor(4.0 * pow(n / 100.0, 2.0 / 9.0))
    if pilot > n - 1:
        pilot = n - 1
    s0 = gamma0
    s1 = 0.0
    for j in range(1, pilot + 1):
        gamma = 0.0
        for t in range(j, n):
            gamma += e[t] * e[t - j]
        gamma /= n
        s0 += 2.0 * gamma
        s1 += 2.0 * j * gamma
    if s0 == 0.0:
        return n - 1
    bw = <int> floor(1.1447 * pow(fabs(s1 / s0), 2.0 / 3.0) * pow(n, 1.0 / 3.0))
    if bw > n - 1:
        bw = n - 1
    return bw
