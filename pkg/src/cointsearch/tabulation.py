"""Seeded Monte Carlo generators behind the shipped critical-value tables.

Two distribution families are simulated here:

* the Dickey-Fuller t-statistic under the unit-root null, both for a raw
  series (deterministic terms inside the DF regression) and for the
  residuals of a spurious levels regression on k independent random walks
  (deterministic terms inside the levels regression, plain DF on the
  residuals);
* the asymptotic trace / maximum-eigenvalue functionals of the VEC rank
  tests, for the restricted-constant and restricted-trend deterministic
  cases, discretized on a fine Brownian grid.

``tools/build_tables.py`` uses these at high replication counts to build
the simulated rows of the table files; the slow test suite re-runs them
at modest counts to validate what is shipped.  Everything is driven by
explicit seeds through counter-based Philox streams, so results do not
depend on scheduling or batch size.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = [
    "simulate_df_stats",
    "simulate_johansen_asymptotic",
    "fit_pvalue_polynomials",
    "fit_crit_surface",
]

_DF_TAG = 0xD1C4EF
_JOHANSEN_TAG = 0x10AA55

_CASE_CODE = {"none": 0, "constant": 1, "constant_and_trend": 2}
_JCASE_CODE = {"restricted_constant": 0, "restricted_trend_with_drift": 1}


def _rng(tag: int, *path: int) -> Generator:
    return Generator(Philox(SeedSequence([tag, *path])))


def _batched_tstat0(Z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """t-ratio of column 0 in a batch of OLS regressions.

    Z has shape (b, t, k); w has shape (b, t).
    """
    b, t, k = Z.shape
    G = np.einsum("bti,btj->bij", Z, Z)
    c = np.einsum("bti,bt->bi", Z, w)
    beta = np.linalg.solve(G, c[..., None])[..., 0]
    resid = w - np.einsum("btj,bj->bt", Z, beta)
    ssr = np.einsum("bt,bt->b", resid, resid)
    s2 = ssr / (t - k)
    e0 = np.zeros((b, k))
    e0[:, 0] = 1.0
    inv00 = np.linalg.solve(G, e0[..., None])[:, 0, 0]
    return beta[:, 0] / np.sqrt(s2 * inv00)


def _batched_ols_resid(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    G = np.einsum("bti,btj->bij", X, X)
    c = np.einsum("bti,bt->bi", X, y)
    beta = np.linalg.solve(G, c[..., None])[..., 0]
    return y - np.einsum("btj,bj->bt", X, beta)


def simulate_df_stats(n_regressors: int, case: str, n: int, reps: int,
                      seed: int, batch: int = 512) -> np.ndarray:
    """DF t-statistics under the (no-cointegration) null.

    With ``n_regressors == 0`` the statistic is the DF regression on a
    single random walk of length ``n`` with the case's deterministic
    terms.  With k >= 1 regressors, k+1 independent random walks are
    generated, the levels regression (with deterministic terms per
    ``case``) is run, and the plain DF statistic of its residuals is
    returned.
    """
    case_code = _CASE_CODE[case]
    k = int(n_regressors)
    out = np.empty(reps)
    done = 0
    block = 0
    while done < reps:
        b = min(batch, reps - done)
        rng = _rng(_DF_TAG, seed, k, case_code, n, block)
        walks = np.cumsum(rng.standard_normal((b, n, k + 1)), axis=1)
        y = walks[:, :, 0]
        if k == 0:
            u = y
            det_in_df = case_code
        else:
            cols = [walks[:, :, 1:]]
            if case_code >= 1:
                cols.append(np.ones((b, n, 1)))
            if case_code >= 2:
                trend = np.broadcast_to(np.arange(1.0, n + 1.0)[None, :, None],
                                        (b, n, 1))
                cols.append(trend)
            u = _batched_ols_resid(np.concatenate(cols, axis=2), y)
            det_in_df = 0
        du = u[:, 1:] - u[:, :-1]
        zcols = [u[:, :-1, None]]
        m = n - 1
        if det_in_df >= 1:
            zcols.append(np.ones((b, m, 1)))
        if det_in_df >= 2:
            zcols.append(np.broadcast_to(np.arange(m, dtype=float)[None, :, None],
                                         (b, m, 1)))
        out[done:done + b] = _batched_tstat0(np.concatenate(zcols, axis=2), du)
        done += b
        block += 1
    return out


def simulate_johansen_asymptotic(m: int, case: str, reps: int, seed: int,
                                 steps: int = 2000, batch: int = 256
                                 ) -> tuple[np.ndarray, np.ndarray]:
    """Draws from the asymptotic trace and max-eigenvalue null
    distributions with ``m`` common trends.

    The statistics are the trace and the largest eigenvalue of
    ``S01' S11^{-1} S01`` where ``S01`` and ``S11`` discretize the
    Brownian functionals ``int F dB'`` and ``int F F' du``; ``F`` is the
    m-dimensional Brownian motion augmented with a constant
    (restricted-constant case) or augmented with the time index and then
    demeaned (restricted-trend case, drift projected out).
    """
    case_code = _JCASE_CODE[case]
    trace = np.empty(reps)
    maxeig = np.empty(reps)
    done = 0
    block = 0
    while done < reps:
        b = min(batch, reps - done)
        rng = _rng(_JOHANSEN_TAG, seed, m, case_code, steps, block)
        dW = rng.standard_normal((b, steps, m)) / np.sqrt(steps)
        B = np.cumsum(dW, axis=1)
        left = np.concatenate([np.zeros((b, 1, m)), B[:, :-1, :]], axis=1)
        if case_code == 0:
            F = np.concatenate([left, np.ones((b, steps, 1))], axis=2)
        else:
            u = np.broadcast_to((np.arange(steps, dtype=float) / steps)
                                [None, :, None], (b, steps, 1))
            F = np.concatenate([left, u], axis=2)
            F = F - F.mean(axis=1, keepdims=True)
        S01 = np.einsum("bti,btj->bij", F, dW)
        S11 = np.einsum("bti,btj->bij", F, F) / steps
        A = np.einsum("bqi,bqj->bij", S01, np.linalg.solve(S11, S01))
        lam = np.linalg.eigvalsh(A)
        trace[done:done + b] = lam.sum(axis=1)
        maxeig[done:done + b] = lam[:, -1]
        done += b
        block += 1
    return trace, maxeig


def fit_pvalue_polynomials(stats: np.ndarray,
                           stats_fine: np.ndarray | None = None) -> dict:
    """Fit MacKinnon-style p-value response polynomials to simulated DF
    draws: quadratic below ``tau_star``, cubic above, both mapping the
    statistic to a normal quantile so that ``p = Phi(poly(stat))``.

    When a second sample simulated at twice the sample size is supplied,
    each fitted quantile is Richardson-extrapolated (``2*q_fine - q``) to
    remove the leading finite-sample bias before fitting.
    """
    from scipy.stats import norm

    small_p = np.concatenate([np.geomspace(2e-4, 0.02, 25),
                              np.linspace(0.025, 0.20, 30)])
    large_p = np.linspace(0.10, 0.9990, 160)

    def q(p):
        base = np.quantile(stats, p)
        if stats_fine is None:
            return base
        return 2.0 * np.quantile(stats_fine, p) - base

    q_small = q(small_p)
    q_large = q(large_p)
    small_coef = np.polynomial.polynomial.polyfit(q_small, norm.ppf(small_p), 2)
    large_coef = np.polynomial.polynomial.polyfit(q_large, norm.ppf(large_p), 3)
    return {
        "smallp": [float(c) for c in small_coef],
        "largep": [float(c) for c in large_coef],
        "tau_star": float(q(0.15)),
        "tau_min": float(q(2e-4)),
        "tau_max": float(q(0.9990)),
    }


def fit_crit_surface(quantiles_by_n: dict[int, float]) -> tuple[float, float, float]:
    """Regress finite-sample quantiles on [1, 1/n, 1/n^2], returning the
    response-surface coefficients (b0 = asymptotic value)."""
    ns = np.array(sorted(quantiles_by_n), dtype=float)
    q = np.array([quantiles_by_n[int(n)] for n in ns])
    X = np.column_stack([np.ones_like(ns), 1.0 / ns, 1.0 / ns**2])
    coef, *_ = np.linalg.lstsq(X, q, rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])
