"""Candidate model descriptions shared by the estimation and search layers."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["CandidateSpec", "DETERMINISTIC_KINDS", "LEVELS", "DIFFERENCES"]

LEVELS = "levels"
DIFFERENCES = "differences"
DETERMINISTIC_KINDS = ("none", "constant", "constant_and_trend")

_DET_TERMS = {"none": 0, "constant": 1, "constant_and_trend": 2}


@dataclass(frozen=True)
class CandidateSpec:
    """One candidate model: predictor subset, deterministic terms, form.

    Level-form candidates come in phi-restricted / phi-free twins;
    difference-form candidates never carry an error-correction parameter
    and may have an empty subset only when a constant is included.
    """

    form: str
    subset: tuple[str, ...]
    deterministic: str
    phi_free: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "subset", tuple(self.subset))
        if self.form not in (LEVELS, DIFFERENCES):
            raise ValueError(f"unknown model form {self.form!r}")
        if len(set(self.subset)) != len(self.subset):
            raise ValueError("duplicate predictors in subset")
        if self.form == LEVELS:
            if not self.subset:
                raise ValueError("level-form candidates need a non-empty subset")
            if self.deterministic not in DETERMINISTIC_KINDS:
                raise ValueError(f"unknown deterministic kind {self.deterministic!r}")
        else:
            if self.phi_free:
                raise ValueError("difference-form candidates have no phi")
            if self.deterministic not in ("none", "constant"):
                raise ValueError(
                    "difference-form candidates allow deterministic terms "
                    "'none' or 'constant' only"
                )
            if not self.subset and self.deterministic != "constant":
                raise ValueError(
                    "an empty subset requires a constant in difference form"
                )

    @property
    def det_terms(self) -> int:
        return _DET_TERMS[self.deterministic]

    @property
    def n_params(self) -> int:
        return len(self.subset) + self.det_terms + (1 if self.phi_free else 0)

    @property
    def id(self) -> str:
        subset = ",".join(self.subset) if self.subset else "(empty)"
        parts = [self.form, subset, self.deterministic]
        if self.form == LEVELS:
            parts.append("phi" if self.phi_free else "nophi")
        return ":".join(parts)

    @classmethod
    def from_id(cls, spec_id: str) -> "CandidateSpec":
        parts = spec_id.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"malformed candidate id {spec_id!r}")
        form, subset_part, det = parts[0], parts[1], parts[2]
        subset = () if subset_part == "(empty)" else tuple(subset_part.split(","))
        phi = len(parts) == 4 and parts[3] == "phi"
        if len(parts) == 4 and parts[3] not in ("phi", "nophi"):
            raise ValueError(f"malformed candidate id {spec_id!r}")
        return cls(form, subset, det, phi)

    def twin(self) -> "CandidateSpec":
        """The same level-form candidate with the phi flag toggled."""
        if self.form != LEVELS:
            raise ValueError("difference-form candidates have no twin")
        return CandidateSpec(self.form, self.subset, self.deterministic,
                             not self.phi_free)
