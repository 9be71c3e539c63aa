from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from qlocal.core.bloch import Prior

REPORT_SCHEMA_VERSION = "qlocal.report.v1"


@dataclass(frozen=True, slots=True)
class EvaluationCaps:
    max_tree_depth: int = 16
    max_repetitions_3d: int = 60
    max_repetitions_2d: int = 500

    def __post_init__(self) -> None:
        if self.max_tree_depth < 1 or self.max_repetitions_3d < 1 or self.max_repetitions_2d < 1:
            raise ValueError("evaluation caps must be >= 1")

    def repetitions_cap(self, prior: Prior) -> int:
        return self.max_repetitions_3d if prior is Prior.SPHERE_3D else self.max_repetitions_2d


@dataclass(frozen=True, slots=True)
class OutcomeRecord:
    outcome: str
    probability: float
    posterior_norm: float
    guess: tuple[float, float, float]
    score: float
    tie_break: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcome": self.outcome,
            "probability": self.probability,
            "posterior_norm": self.posterior_norm,
            "guess": list(self.guess),
            "score": self.score,
            "tie_break": self.tie_break,
        }


@dataclass(frozen=True, slots=True)
class FidelityReport:
    """Exact average fidelity of one strategy under one prior.

    ``score`` of an outcome is V(x) . M(x); the fidelity is (1 + sum of
    scores) / 2, which for the optimal guess is (1 + sum |V(x)|) / 2.
    """

    copies: int
    fidelity: float
    prior: Prior
    strategy: str
    guess_rule: str
    total_probability: float
    score_sum: float
    outcomes: tuple[OutcomeRecord, ...] = field(default_factory=tuple)
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if not 0.0 <= self.fidelity <= 1.0 + 1e-9:
            raise ValueError(f"fidelity {self.fidelity} lies outside [0, 1]")

    @property
    def scaled_infidelity(self) -> float:
        return self.copies * (1.0 - self.fidelity)

    def to_dict(self, include_outcomes: bool = True) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "copies": self.copies,
            "fidelity": self.fidelity,
            "scaled_infidelity": self.scaled_infidelity,
            "prior": self.prior.value,
            "strategy": self.strategy,
            "guess_rule": self.guess_rule,
            "total_probability": self.total_probability,
            "score_sum": self.score_sum,
            "notes": list(self.notes),
        }
        if include_outcomes:
            payload["outcomes"] = [record.to_dict() for record in self.outcomes]
        return payload


@dataclass(frozen=True, slots=True)
class SeriesPoint:
    copies: int
    fidelity: float
    stderr: float = 0.0

    def __post_init__(self) -> None:
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if self.stderr < 0.0:
            raise ValueError("stderr must be >= 0")

    @property
    def scaled_infidelity(self) -> float:
        return self.copies * (1.0 - self.fidelity)

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.copies,
            "fidelity": self.fidelity,
            "scaled_infidelity": self.scaled_infidelity,
            "stderr": self.stderr,
        }


__all__ = [
    "REPORT_SCHEMA_VERSION",
    "EvaluationCaps",
    "OutcomeRecord",
    "FidelityReport",
    "SeriesPoint",
]
