"""Exception types shared across the package."""


class CointsearchError(Exception):
    """Base class for all package errors."""


class InsufficientDataError(CointsearchError):
    """A series or sample is too short for the requested operation."""


class DegenerateSeriesError(CointsearchError):
    """A series has zero variance where variation is required."""


class AlignmentError(CointsearchError):
    """Series cannot be aligned onto a common year range."""


class DataError(CointsearchError):
    """Malformed input data (CSV parsing, schema violations)."""


class SingularDesignError(CointsearchError):
    """Regression design matrix is rank deficient."""


class DegreesOfFreedomError(CointsearchError):
    """Fewer observations than parameters."""


class EstimationError(CointsearchError):
    """Numerical failure during estimation."""


class DegenerateFitError(CointsearchError):
    """A perfect fit (SSR = 0) where a positive SSR is required."""


class UnsupportedDimensionError(CointsearchError):
    """A critical-value table does not cover the requested dimension."""


class NoCointegrationSpaceError(CointsearchError):
    """A consistency check was requested against a rank-zero VEC fit."""


class ConfigError(CointsearchError):
    """Invalid run configuration."""
