"""Candidate enumeration, information-criterion scoring and the search.

Level mode enumerates every non-empty predictor subset crossed with three
deterministic cases and the phi-restriction flag (6*(2^k - 1) candidates
for k predictors); difference mode enumerates all subsets crossed with
{none, constant}, excluding the empty model without a constant
(2^(k+1) - 1 candidates).  Survivors are scored with

    AIC = ln SSR + 2N/n,      BIC = ln SSR + N ln(n)/n,

on a common sample so the criteria are comparable across candidates, and
ranked by BIC with the AIC ordering annotated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .cointegration import (
    CandidateOutcome,
    EgScreenResult,
    check_candidate,
    eg_step1,
)
from .config import SearchConfig
from .errors import ConfigError, DegenerateFitError
from .regress import ECEstimate
from .series import AlignedDataset
from .specs import CandidateSpec, DIFFERENCES, LEVELS

__all__ = [
    "CandidateSpec",
    "InformationScores",
    "RankedModel",
    "SearchReport",
    "enumerate_candidates",
    "score",
    "evidence_ratios",
    "run_search",
    "merge_predictors",
]

_DET_ORDER = {"none": 0, "constant": 1, "constant_and_trend": 2}


def merged_name(group: Sequence[str]) -> str:
    return "+".join(group)


def merge_predictors(data: AlignedDataset, predictors: Sequence[str],
                     merge_groups: Sequence[Sequence[str]]
                     ) -> tuple[AlignedDataset, list[str], list[str]]:
    """Replace each merge group by the sum of its members.

    Returns the augmented dataset, the new predictor list (group members
    replaced in place by the summed column) and the merged column names.
    """
    predictors = list(predictors)
    merged: list[str] = []
    cols = dict(data.columns)
    for group in merge_groups:
        name = merged_name(group)
        total = np.sum([data.column(m) for m in group], axis=0)
        cols[name] = total
        first = min(predictors.index(m) for m in group)
        predictors = [p for p in predictors if p not in group]
        predictors.insert(first, name)
        merged.append(name)
    return AlignedDataset(data.first_year, cols, data.target), predictors, merged


def enumerate_candidates(predictors: Sequence[str], mode: str,
                         merge_groups: Sequence[Sequence[str]] | None = None,
                         deterministic_options: Sequence[str] | None = None
                         ) -> list[CandidateSpec]:
    """Deterministically ordered candidate list.

    With merge groups, the groups' members are assumed already replaced
    by their summed predictor (see :func:`merge_predictors`) and only
    subsets containing every merged predictor are kept.  Ordering is
    lexicographic by subset (as index tuples), then deterministic case,
    then the phi flag.
    """
    predictors = list(predictors)
    if not predictors:
        raise ConfigError("cannot enumerate candidates without predictors")
    if len(set(predictors)) != len(predictors):
        raise ConfigError("duplicate predictor names")
    required = {merged_name(g) for g in (merge_groups or ())}
    missing = required - set(predictors)
    if missing:
        raise ConfigError(f"merged predictors {sorted(missing)} not in list")

    if mode == LEVELS:
        det_all = ("none", "constant", "constant_and_trend")
        phi_flags = (False, True)
        min_size = 1
    elif mode == DIFFERENCES:
        det_all = ("none", "constant")
        phi_flags = (False,)
        min_size = 0
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    det_cases = tuple(d for d in det_all
                      if deterministic_options is None
                      or d in deterministic_options)
    if not det_cases:
        raise ConfigError("no deterministic cases left after filtering")

    index = {name: i for i, name in enumerate(predictors)}
    specs: list[CandidateSpec] = []
    for size in range(min_size, len(predictors) + 1):
        for combo in combinations(range(len(predictors)), size):
            subset = tuple(predictors[i] for i in combo)
            if required and not required <= set(subset):
                continue
            for det in det_cases:
                if mode == DIFFERENCES and not subset and det == "none":
                    continue
                for phi in phi_flags:
                    specs.append(CandidateSpec(mode, subset, det, phi))
    specs.sort(key=lambda sp: (tuple(index[nm] for nm in sp.subset),
                               _DET_ORDER[sp.deterministic], sp.phi_free))
    return specs


def score(ssr: float, n_params: int, n_obs: int) -> tuple[float, float]:
    """(AIC, BIC) of a fit: ln SSR plus the 2N/n and N ln(n)/n penalties."""
    if n_obs < 1:
        raise ValueError("n_obs must be at least 1")
    if not ssr > 0.0:
        raise DegenerateFitError(
            "information criteria are undefined for a perfect fit (SSR = 0)")
    log_ssr = math.log(ssr)
    aic = log_ssr + 2.0 * n_params / n_obs
    bic = log_ssr + n_params * math.log(n_obs) / n_obs
    return aic, bic


def evidence_ratios(scores: Sequence[float]) -> list[float]:
    """exp(-(s - min)/2) within a cohort; the best model scores 1."""
    if len(scores) == 0:
        raise ValueError("evidence ratios need a non-empty score list")
    arr = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("scores must be finite")
    return [float(v) for v in np.exp(-(arr - arr.min()) / 2.0)]


@dataclass(frozen=True)
class InformationScores:
    aic: float
    bic: float
    er_aic: float
    er_bic: float


@dataclass(frozen=True)
class RankedModel:
    """One surviving candidate with its scores and diagnostic record."""

    spec: CandidateSpec
    estimate: ECEstimate
    scores: InformationScores
    diagnostics: Mapping[str, float]
    bic_rank: int
    aic_rank: int


@dataclass(frozen=True)
class DiscardRecord:
    spec_id: str
    reason: str
    detail: str


@dataclass(frozen=True)
class SearchReport:
    mode: str
    survivors: tuple[RankedModel, ...]
    discards: tuple[DiscardRecord, ...]
    n_obs_scored: int
    n_candidates: int
    predictors: tuple[str, ...]
    merged: tuple[str, ...]


def run_search(data: AlignedDataset, config: SearchConfig) -> SearchReport:
    """Exhaustive candidate search over one dataset.

    Levels mode: EG screen once per (subset, deterministic) pair (the phi
    twins share it), EC estimation and BG filtering per candidate.
    Differences mode: OLS plus BG filtering.  Survivors are scored on the
    common (n - 1)-observation sample and sorted by BIC ascending with
    ties broken by parameter count, then spec id.
    """
    missing = {config.target, *config.predictors} - set(data.columns)
    if missing:
        raise ConfigError(f"dataset lacks configured columns {sorted(missing)}")
    if data.target != config.target:
        data = AlignedDataset(data.first_year, data.columns, config.target)
    data, predictors, merged = merge_predictors(
        data, config.predictors, config.merge_groups)
    specs = enumerate_candidates(predictors, config.mode, config.merge_groups,
                                 config.deterministic_options)
    thresholds = config.thresholds

    outcomes: list[CandidateOutcome] = []
    screens: dict[tuple, EgScreenResult] = {}
    for spec in specs:
        screen = None
        if spec.form == LEVELS:
            key = (spec.subset, spec.deterministic)
            screen = screens.get(key)
            if screen is None:
                screen = eg_step1(spec, data, thresholds.eg_level,
                                  thresholds.eg_augment_lags)
                screens[key] = screen
        outcomes.append(check_candidate(spec, data, thresholds,
                                        config.nls, screen=screen))

    survivors = [o for o in outcomes if o.survivor]
    discards = tuple(
        DiscardRecord(o.spec.id, o.reason, o.detail or "")
        for o in outcomes if not o.survivor
    )

    n_score = len(data) - 1
    ranked = _rank(survivors, n_score)
    return SearchReport(
        mode=config.mode,
        survivors=ranked,
        discards=discards,
        n_obs_scored=n_score,
        n_candidates=len(specs),
        predictors=tuple(predictors),
        merged=tuple(merged),
    )


def _rank(survivors: Sequence[CandidateOutcome], n_obs: int
          ) -> tuple[RankedModel, ...]:
    if not survivors:
        return ()
    pairs = [score(o.estimate.ssr, o.spec.n_params, n_obs) for o in survivors]
    aics = [p[0] for p in pairs]
    bics = [p[1] for p in pairs]
    er_aic = evidence_ratios(aics)
    er_bic = evidence_ratios(bics)

    def order(values):
        keys = sorted(
            range(len(survivors)),
            key=lambda i: (values[i], survivors[i].spec.n_params,
                           survivors[i].spec.id),
        )
        rank = [0] * len(survivors)
        for pos, i in enumerate(keys, start=1):
            rank[i] = pos
        return rank

    bic_rank = order(bics)
    aic_rank = order(aics)

    models = []
    for i, outcome in enumerate(survivors):
        diag: dict[str, float] = {"bg_lm_pvalue": outcome.bg.p_value}
        if outcome.screen is not None:
            diag["eg_statistic"] = outcome.screen.statistic
            diag["eg_critical_value"] = outcome.screen.critical_value
        models.append(RankedModel(
            spec=outcome.spec,
            estimate=outcome.estimate,
            scores=InformationScores(aic=aics[i], bic=bics[i],
                                     er_aic=er_aic[i], er_bic=er_bic[i]),
            diagnostics=diag,
            bic_rank=bic_rank[i],
            aic_rank=aic_rank[i],
        ))
    models.sort(key=lambda m: m.bic_rank)
    return tuple(models)
