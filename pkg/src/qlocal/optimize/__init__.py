from __future__ import annotations

from qlocal.optimize.models import OptimizationConfig, OptimizationResult, RestartOutcome
from qlocal.optimize.objective import TreeObjective
from qlocal.optimize.search import heuristic_directions, optimize_tree
from qlocal.optimize.structure import (
    StructureReport,
    canonical_directions,
    optimal_guess_vector,
    structure_report,
    sum_guess_deviation_deg,
    weighted_sum_guess,
)

__all__ = [
    "OptimizationConfig",
    "OptimizationResult",
    "RestartOutcome",
    "TreeObjective",
    "heuristic_directions",
    "optimize_tree",
    "StructureReport",
    "canonical_directions",
    "optimal_guess_vector",
    "structure_report",
    "sum_guess_deviation_deg",
    "weighted_sum_guess",
]
