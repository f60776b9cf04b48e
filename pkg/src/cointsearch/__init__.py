"""Exhaustive search for cointegrated and short-run models of an annual
target series: unit-root pretests, Engle-Granger screening, NLS
error-correction estimation, residual diagnostics, information-criterion
ranking, Johansen cross-validation and Monte Carlo forecasting."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .cointegration import (
    BgLmResult,
    CandidateOutcome,
    EgScreenResult,
    Thresholds,
    bg_lm_test,
    check_candidate,
    eg_step1,
)
from .config import SearchConfig
from .errors import CointsearchError
from .forecast import (
    ComparisonReport,
    ForecastBands,
    ForecastConfig,
    forecast_compare,
    mc_forecast,
)
from .generator import (
    InformationScores,
    RankedModel,
    SearchReport,
    enumerate_candidates,
    evidence_ratios,
    run_search,
    score,
)
from .johansen import (
    ConsistencyResult,
    VecResult,
    ec_consistency,
    johansen_test,
)
from .regress import (
    ECEstimate,
    NlsOptions,
    OlsEstimate,
    difference_ols,
    nls_ec_fit,
    ols_fit,
)
from .series import AlignedDataset, TimeSeries, align, diff, lag
from .specs import CandidateSpec
from .unitroot import (
    KpssResult,
    UnitRootResult,
    adf_test,
    df_pvalue,
    eg_critical_value,
    kpss_test,
    nw_bandwidth,
)

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "AlignedDataset",
    "BgLmResult",
    "CandidateOutcome",
    "CandidateSpec",
    "CointsearchError",
    "ComparisonReport",
    "ConsistencyResult",
    "ECEstimate",
    "EgScreenResult",
    "ForecastBands",
    "ForecastConfig",
    "InformationScores",
    "KpssResult",
    "NlsOptions",
    "OlsEstimate",
    "RankedModel",
    "SearchConfig",
    "SearchReport",
    "Thresholds",
    "TimeSeries",
    "UnitRootResult",
    "VecResult",
    "adf_test",
    "align",
    "bg_lm_test",
    "check_candidate",
    "df_pvalue",
    "diff",
    "difference_ols",
    "ec_consistency",
    "eg_critical_value",
    "eg_step1",
    "enumerate_candidates",
    "evidence_ratios",
    "forecast_compare",
    "johansen_test",
    "kpss_test",
    "lag",
    "mc_forecast",
    "nls_ec_fit",
    "nw_bandwidth",
    "ols_fit",
    "run_search",
    "score",
]
