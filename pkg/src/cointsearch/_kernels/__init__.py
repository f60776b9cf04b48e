"""Kernel dispatch: compiled extension when built, NumPy fallback otherwise.

Set ``COINTSEARCH_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

import os

from . import _pure

if os.environ.get("COINTSEARCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pure
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "python"

CASE_NONE = _pure.CASE_NONE
CASE_CONST = _pure.CASE_CONST
CASE_TREND = _pure.CASE_TREND

adf_tstat = _impl.adf_tstat
adf_best_lag = _impl.adf_best_lag
kpss_statistic = _impl.kpss_statistic
nw_bandwidth = _impl.nw_bandwidth

__all__ = [
    "BACKEND",
    "CASE_NONE",
    "CASE_CONST",
    "CASE_TREND",
    "adf_tstat",
    "adf_best_lag",
    "kpss_statistic",
    "nw_bandwidth",
]
