from __future__ import annotations

from qlocal.simulate.ledger import LedgerRow, append_results, read_ledger
from qlocal.simulate.models import ExactComparison, SimulationConfig, SimulationResult
from qlocal.simulate.runner import compare_exact, simulate
from qlocal.simulate.two_stage import (
    LambdaSweep,
    first_stage_fidelity,
    optimal_lambda,
    simulate_two_stage,
    sweep_lambda,
    two_stage_estimate,
)

__all__ = [
    "LedgerRow",
    "append_results",
    "read_ledger",
    "ExactComparison",
    "SimulationConfig",
    "SimulationResult",
    "compare_exact",
    "simulate",
    "LambdaSweep",
    "first_stage_fidelity",
    "optimal_lambda",
    "simulate_two_stage",
    "sweep_lambda",
    "two_stage_estimate",
]
