"""Run configuration: a declarative mapping with validation and defaults.

The CLI reads this from a JSON file and applies flag overrides; library
callers construct :class:`SearchConfig` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from .cointegration import Thresholds
from .errors import ConfigError
from .regress import NlsOptions

__all__ = ["SearchConfig"]

_MODES = ("levels", "differences")
_DET = ("none", "constant", "constant_and_trend")


@dataclass(frozen=True)
class SearchConfig:
    target: str
    predictors: tuple[str, ...]
    mode: str = "levels"
    merge_groups: tuple[tuple[str, ...], ...] = ()
    eg_level: float = 0.05
    bglm_level: float = 0.20
    bglm_lags: int = 2
    bg_design: str = "jacobian"
    deterministic_options: tuple[str, ...] = _DET
    nls: NlsOptions = field(default_factory=NlsOptions)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "predictors", tuple(self.predictors))
        object.__setattr__(self, "merge_groups",
                           tuple(tuple(g) for g in self.merge_groups))
        object.__setattr__(self, "deterministic_options",
                           tuple(self.deterministic_options))
        if not self.predictors:
            raise ConfigError("at least one predictor is required")
        if self.target in self.predictors:
            raise ConfigError(f"target {self.target!r} cannot be a predictor")
        if len(set(self.predictors)) != len(self.predictors):
            raise ConfigError("duplicate predictor names")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}")
        for level_name in ("eg_level", "bglm_level"):
            v = getattr(self, level_name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{level_name} must lie in (0, 1)")
        bad = set(self.deterministic_options) - set(_DET)
        if bad or not self.deterministic_options:
            raise ConfigError(f"invalid deterministic options {bad or '(empty)'}")
        seen: set[str] = set()
        for group in self.merge_groups:
            if len(group) < 2:
                raise ConfigError("merge groups need at least two members")
            if seen & set(group):
                raise ConfigError("merge groups must be disjoint")
            seen |= set(group)
            missing = set(group) - set(self.predictors)
            if missing:
                raise ConfigError(f"merge group members {sorted(missing)} "
                                  f"are not predictors")

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(eg_level=self.eg_level, bglm_level=self.bglm_level,
                          bglm_lags=self.bglm_lags, bg_design=self.bg_design)

    @classmethod
    def from_dict(cls, raw: dict) -> "SearchConfig":
        data = dict(raw)
        nls = data.pop("nls", None)
        try:
            if nls is not None:
                data["nls"] = NlsOptions(**nls)
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad search configuration: {exc}") from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["predictors"] = list(self.predictors)
        out["merge_groups"] = [list(g) for g in self.merge_groups]
        out["deterministic_options"] = list(self.deterministic_options)
        return out
