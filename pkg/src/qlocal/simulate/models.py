from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from qlocal.core.bloch import Prior

DEFAULT_BLOCK_SIZE = 65536
Z_THRESHOLD = 4.0


@dataclass(frozen=True, slots=True)
class SimulationConfig:
    trials: int
    seed: int
    block_size: int = DEFAULT_BLOCK_SIZE
    threads: int | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")

    @property
    def block_sizes(self) -> list[int]:
        full, rest = divmod(self.trials, self.block_size)
        return [self.block_size] * full + ([rest] if rest else [])


@dataclass(frozen=True, slots=True)
class SimulationResult:
    """Sampled average fidelity; ``stderr`` is the sample stddev over sqrt(trials)."""

    trials: int
    mean: float
    stderr: float
    seed: int
    strategy: str
    strategy_hash: str
    scheme: str
    prior: Prior
    copies: int
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0.0 <= self.mean <= 1.0:
            raise ValueError(f"mean fidelity {self.mean} lies outside [0, 1]")
        if self.stderr < 0.0 or math.isnan(self.stderr):
            raise ValueError("stderr must be >= 0")

    @property
    def scaled_infidelity(self) -> float:
        return self.copies * (1.0 - self.mean)

    def to_ledger_row(self) -> dict[str, Any]:
        return {
            "strategy_hash": self.strategy_hash,
            "scheme": self.scheme,
            "prior": self.prior.value,
            "N": self.copies,
            "trials": self.trials,
            "seed": self.seed,
            "mean": repr(self.mean),
            "stderr": repr(self.stderr),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy,
            "strategy_hash": self.strategy_hash,
            "scheme": self.scheme,
            "prior": self.prior.value,
            "N": self.copies,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "stderr": self.stderr,
            "scaled_infidelity": self.scaled_infidelity,
            "notes": list(self.notes),
        }


@dataclass(frozen=True, slots=True)
class ExactComparison:
    simulation: SimulationResult
    exact: float
    offset: float = 0.0
    threshold: float = Z_THRESHOLD

    @property
    def reference(self) -> float:
        return self.exact + self.offset

    @property
    def z_score(self) -> float:
        difference = self.simulation.mean - self.reference
        if self.simulation.stderr == 0.0:
            return 0.0 if difference == 0.0 else math.copysign(math.inf, difference)
        return difference / self.simulation.stderr

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= self.threshold

    def to_dict(self) -> dict[str, Any]:
        return {
            "simulation": self.simulation.to_dict(),
            "exact": self.exact,
            "offset": self.offset,
            "z_score": self.z_score,
            "threshold": self.threshold,
            "passed": self.passed,
        }


__all__ = ["DEFAULT_BLOCK_SIZE", "Z_THRESHOLD", "SimulationConfig", "SimulationResult", "ExactComparison"]
