from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from qlocal.evaluate.models import FidelityReport
from qlocal.strategy.models import AdaptiveTree

MAX_OPTIMIZER_DEPTH = 8


@dataclass(frozen=True, slots=True)
class OptimizationConfig:
    """Multistart search settings.

    ``tolerance`` is the absolute change in F below which a restart counts
    as converged. With ``gauge_fixed`` the root is pinned to z (x in 2D) and
    the node after outcome 0 to the x-z plane.
    """

    restarts: int = 20
    max_iterations: int = 20000
    tolerance: float = 1e-10
    gauge_fixed: bool = True
    seed: int | None = None
    refine: bool = True
    heuristic_fraction: float = 0.5
    jitter: float = 0.05
    max_depth: int = MAX_OPTIMIZER_DEPTH

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be > 0")
        if not 0.0 <= self.heuristic_fraction <= 1.0:
            raise ValueError("heuristic_fraction must lie in [0, 1]")
        if self.jitter < 0.0:
            raise ValueError("jitter must be >= 0")

    def to_dict(self) -> dict[str, Any]:
        return {
            "restarts": self.restarts,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "gauge_fixed": self.gauge_fixed,
            "seed": self.seed,
            "refine": self.refine,
            "heuristic_fraction": self.heuristic_fraction,
            "jitter": self.jitter,
        }


@dataclass(frozen=True, slots=True)
class RestartOutcome:
    index: int
    initializer: str
    fidelity: float
    parameters: tuple[float, ...]
    history: tuple[float, ...]
    iterations: int
    converged: bool
    refined: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "initializer": self.initializer,
            "fidelity": self.fidelity,
            "iterations": self.iterations,
            "converged": self.converged,
            "refined": self.refined,
        }


@dataclass(frozen=True, slots=True)
class OptimizationResult:
    tree: AdaptiveTree
    report: FidelityReport
    config: OptimizationConfig
    seed: int
    best_restart: int
    restarts: tuple[RestartOutcome, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def fidelity(self) -> float:
        return self.report.fidelity

    @property
    def converged(self) -> bool:
        return self.restarts[self.best_restart].converged

    @property
    def restart_fidelities(self) -> tuple[float, ...]:
        return tuple(outcome.fidelity for outcome in self.restarts)

    @property
    def history(self) -> tuple[float, ...]:
        return self.restarts[self.best_restart].history

    @property
    def iterations(self) -> int:
        return self.restarts[self.best_restart].iterations

    def meta_dict(self) -> dict[str, Any]:
        """Sidecar document stored next to the optimized strategy."""
        return {
            "seed": self.seed,
            "config": self.config.to_dict(),
            "best_restart": self.best_restart,
            "iterations": self.iterations,
            "converged": self.converged,
            "fidelity": self.fidelity,
            "history": list(self.history),
            "restarts": [outcome.to_dict() for outcome in self.restarts],
            "notes": list(self.notes),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.tree.to_dict(),
            "report": self.report.to_dict(include_outcomes=False),
            **self.meta_dict(),
        }


__all__ = ["MAX_OPTIMIZER_DEPTH", "OptimizationConfig", "RestartOutcome", "OptimizationResult"]
