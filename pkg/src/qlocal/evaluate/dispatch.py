from __future__ import annotations

from qlocal.core.bloch import Prior
from qlocal.errors import UsageError
from qlocal.evaluate.fixed_axes import eval_fixed_axes
from qlocal.evaluate.models import EvaluationCaps, FidelityReport
from qlocal.evaluate.tree import eval_adaptive_tree
from qlocal.strategy.guesses import GuessKind, GuessRule, OptimalGuess
from qlocal.strategy.models import AdaptiveTree, FixedAxesPlan, Strategy, TwoStagePlan


def default_prior(strategy: Strategy) -> Prior:
    if isinstance(strategy, FixedAxesPlan):
        return strategy.prior
    if isinstance(strategy, AdaptiveTree) and strategy.is_planar:
        return Prior.CIRCLE_2D
    return Prior.SPHERE_3D


def evaluate_strategy(
    strategy: Strategy,
    prior: Prior,
    guess: GuessRule | GuessKind | str | None = None,
    caps: EvaluationCaps | None = None,
    threads: int | None = None,
    include_outcomes: bool = True,
) -> FidelityReport:
    """Route a strategy to its exact evaluator."""
    if isinstance(strategy, TwoStagePlan):
        raise UsageError("two-stage plans have no exact evaluator; use `simulate` instead")
    if isinstance(strategy, FixedAxesPlan):
        return eval_fixed_axes(strategy, guess, prior, caps=caps, include_outcomes=include_outcomes)
    rule: GuessRule | None
    if guess is None or isinstance(guess, (str, GuessKind)):
        kind = GuessKind.parse(guess or GuessKind.OPTIMAL)
        if kind is GuessKind.TOMOGRAPHIC:
            raise UsageError("the tomographic guess needs a fixed-axes plan")
        if kind is GuessKind.CONSTANT:
            raise UsageError("a constant guess needs an explicit vector")
        rule = OptimalGuess.for_prior(prior)
    else:
        rule = guess
    return eval_adaptive_tree(strategy, prior, guess=rule, caps=caps, threads=threads, include_outcomes=include_outcomes)


__all__ = ["default_prior", "evaluate_strategy"]
