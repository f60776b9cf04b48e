"""Annual time-series container and elementary transformations.

Series are annually indexed, contiguous and immutable.  Every other module
works on :class:`TimeSeries` atoms or on an :class:`AlignedDataset` built
from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, DataError, InsufficientDataError

__all__ = ["TimeSeries", "AlignedDataset", "diff", "lag", "align"]


def _as_clean_array(values: Iterable[float], name: str) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DataError(f"series {name!r} must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DataError(f"series {name!r} has a non-finite value at position {bad}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A named, contiguous annual series of finite values."""

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_clean_array(self.values, self.name))
        object.__setattr__(self, "start_year", int(self.start_year))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def window(self, first: int, last: int) -> "TimeSeries":
        """Return the sub-series covering years ``first..last`` inclusive."""
        if first < self.start_year or last > self.end_year or first > last:
            raise AlignmentError(
                f"window {first}-{last} outside {self.name!r} range "
                f"{self.start_year}-{self.end_year}"
            )
        i0 = first - self.start_year
        return TimeSeries(self.name, first, self.values[i0:i0 + (last - first + 1)])


def diff(s: TimeSeries, d: int = 1) -> TimeSeries:
    """d-fold first difference; the result starts ``d`` years later."""
    if d < 1:
        raise ValueError("difference order must be a positive integer")
    if len(s) <= d:
        raise InsufficientDataError(
            f"cannot take {d}-fold difference of {s.name!r} with {len(s)} observations"
        )
    return TimeSeries(s.name, s.start_year + d, np.diff(s.values, n=d))


def lag(s: TimeSeries, k: int = 1) -> TimeSeries:
    """Backshift by ``k`` years: the result at year t equals ``s`` at year t-k."""
    if k < 1:
        raise ValueError("lag must be a positive integer")
    if len(s) <= k:
        raise InsufficientDataError(
            f"cannot lag {s.name!r} of length {len(s)} by {k}"
        )
    return TimeSeries(s.name, s.start_year + k, s.values[:-k])


@dataclass(frozen=True)
class AlignedDataset:
    """Equal-length named columns over one shared year range."""

    first_year: int
    columns: Mapping[str, np.ndarray]
    target: str

    def __post_init__(self) -> None:
        cols = {str(k): _as_clean_array(v, str(k)) for k, v in self.columns.items()}
        lengths = {len(v) for v in cols.values()}
        if len(lengths) != 1:
            raise AlignmentError("aligned columns must share one length")
        if self.target not in cols:
            raise AlignmentError(f"target column {self.target!r} not present")
        object.__setattr__(self, "columns", cols)

    def __len__(self) -> int:
        return int(next(iter(self.columns.values())).shape[0])

    @property
    def last_year(self) -> int:
        return self.first_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.last_year + 1)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise AlignmentError(f"no column named {name!r}") from None

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(name, self.first_year, self.column(name))

    def window(self, first: int, last: int) -> "AlignedDataset":
        if first < self.first_year or last > self.last_year or first > last:
            raise AlignmentError(
                f"window {first}-{last} outside dataset range "
                f"{self.first_year}-{self.last_year}"
            )
        i0 = first - self.first_year
        n = last - first + 1
        cols = {k: v[i0:i0 + n] for k, v in self.columns.items()}
        return AlignedDataset(first, cols, self.target)


def align(series: Sequence[TimeSeries], target: str | None = None) -> AlignedDataset:
    """Truncate all series to their common year range, preserving order.

    The target defaults to the first series.  Raises
    :class:`AlignmentError` when the ranges have an empty intersection,
    naming the offending series.
    """
    series = list(series)
    if not series:
        raise AlignmentError("cannot align an empty collection")
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise AlignmentError("duplicate series names in alignment")
    first = max(s.start_year for s in series)
    last = min(s.end_year for s in series)
    if first > last:
        widest = max(series, key=lambda s: s.start_year)
        raise AlignmentError(
            f"empty common year range; {widest.name!r} starts at {widest.start_year} "
            f"but another series ends at {last}"
        )
    cols = {s.name: s.window(first, last).values for s in series}
    return AlignedDataset(first, cols, target if target is not None else names[0])
