from __future__ import annotations

from qlocal.strategy.guesses import (
    ConstantGuess,
    GuessKind,
    GuessRule,
    OptimalGuess,
    TomographicGuess,
    optimal_guess,
    orthonormal_completion,
    tomographic_guess,
    two_stage_guess,
)
from qlocal.strategy.models import (
    AdaptiveTree,
    FixedAxesPlan,
    FrequencyRecord,
    Strategy,
    TwoStagePlan,
    tree_direction,
)
from qlocal.strategy.serialization import dump_strategy, load_strategy, strategy_hash


__all__ = [
    "AdaptiveTree",
    "FixedAxesPlan",
    "FrequencyRecord",
    "Strategy",
    "TwoStagePlan",
    "ConstantGuess",
    "GuessKind",
    "GuessRule",
    "OptimalGuess",
    "TomographicGuess",
    "optimal_guess",
    "orthonormal_completion",
    "tomographic_guess",
    "two_stage_guess",
    "tree_direction",
    "dump_strategy",
    "load_strategy",
    "strategy_hash",
]
