from __future__ import annotations

from typing import Callable

import numpy as np

from qlocal.core.bloch import UNIT_TOLERANCE, Prior, sample_prior
from qlocal.errors import PlanError
from qlocal.evaluate.dispatch import default_prior, evaluate_strategy
from qlocal.evaluate.fixed_axes import fixed_axes_posteriors
from qlocal.evaluate.models import EvaluationCaps
from qlocal.evaluate.tree import leaf_table
from qlocal.moments.polynomial import PosteriorVector
from qlocal.simulate.blocks import overlap_fidelities, run_blocks
from qlocal.simulate.models import DEFAULT_BLOCK_SIZE, ExactComparison, SimulationConfig, SimulationResult
from qlocal.strategy.guesses import (
    ConstantGuess,
    GuessKind,
    GuessRule,
    OptimalGuess,
    TomographicGuess,
)
from qlocal.strategy.models import AdaptiveTree, FixedAxesPlan, Strategy, TwoStagePlan
from qlocal.strategy.serialization import strategy_hash

Sampler = Callable[[np.ndarray, np.random.Generator], np.ndarray]


def _resolve_rule(guess: GuessRule | GuessKind | str | None, prior: Prior, strategy: Strategy) -> GuessRule:
    if guess is not None and not isinstance(guess, (str, GuessKind)):
        return guess
    kind = GuessKind.parse(guess or GuessKind.OPTIMAL)
    if kind is GuessKind.OPTIMAL:
        return OptimalGuess.for_prior(prior)
    if kind is GuessKind.TOMOGRAPHIC:
        if not isinstance(strategy, FixedAxesPlan):
            raise PlanError("the tomographic guess needs a fixed-axes plan")
        return TomographicGuess(strategy)
    raise PlanError("a constant guess needs an explicit vector")


def _optimal_lookup(posteriors: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(posteriors, axis=-1)
    nonzero = norms > UNIT_TOLERANCE
    safe = np.where(nonzero, norms, 1.0)
    return np.where(nonzero[..., None], posteriors / safe[..., None], tiebreak)


def tree_sampler(tree: AdaptiveTree, prior: Prior, rule: GuessRule, caps: EvaluationCaps | None = None) -> Sampler:
    """Walk the tree for a batch of states; guesses are looked up per leaf."""
    if isinstance(rule, ConstantGuess):
        guesses = np.broadcast_to(rule.vector.array, ((1 << tree.depth), 3))
    elif isinstance(rule, OptimalGuess):
        guesses = _optimal_lookup(leaf_table(tree, prior, caps=caps).posteriors, rule.tiebreak.array)
    else:
        empty = PosteriorVector((0.0, 0.0, 0.0), 0.0)
        guesses = np.array(
            [rule.guess(format(index, f"0{tree.depth}b"), empty).array for index in range(1 << tree.depth)]
        )

    def sample(states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        leaves = np.zeros(states.shape[0], dtype=np.int64)
        for level in range(tree.depth):
            rows = tree.directions[(1 << level) - 1 + leaves]
            plus = 0.5 * (1.0 + np.einsum("ij,ij->i", rows, states))
            bits = (rng.random(states.shape[0]) >= plus).astype(np.int64)
            leaves += bits << level
        return guesses[leaves]

    return sample


def fixed_axes_sampler(plan: FixedAxesPlan, prior: Prior, rule: GuessRule, caps: EvaluationCaps | None = None) -> Sampler:
    """Binomial plus-counts per axis; only the optimal guess needs an exact table."""
    axes = plan.axis_matrix
    reps = plan.repetitions
    lookup = None
    if isinstance(rule, OptimalGuess):
        lookup, _ = fixed_axes_posteriors(plan, prior, caps).optimal_guesses(rule.tiebreak.array)

    def sample(states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        plus = np.clip(0.5 * (1.0 + states @ axes.T), 0.0, 1.0)
        counts = rng.binomial(reps, plus)
        if lookup is not None:
            return lookup[tuple(counts.T)]
        if isinstance(rule, ConstantGuess):
            return np.broadcast_to(rule.vector.array, states.shape)
        raw = (2.0 * counts / reps - 1.0) @ axes
        norms = np.linalg.norm(raw, axis=1)
        ties = norms <= UNIT_TOLERANCE
        safe = np.where(ties, 1.0, norms)
        return np.where(ties[:, None], axes[0], raw / safe[:, None])

    return sample


def scheme_label(strategy: Strategy, prior: Prior, rule: GuessRule) -> str:
    if isinstance(strategy, TwoStagePlan):
        return "two-stage"
    suffix = {GuessKind.OPTIMAL: "og", GuessKind.TOMOGRAPHIC: "t", GuessKind.CONSTANT: "const"}[rule.kind]
    if isinstance(strategy, FixedAxesPlan):
        return f"{prior.value}-{suffix}"
    return f"{prior.value}-tree-{suffix}"


def simulate(
    strategy: Strategy,
    prior: Prior | None = None,
    trials: int = 100_000,
    seed: int = 0,
    guess: GuessRule | GuessKind | str | None = None,
    threads: int | None = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
    caps: EvaluationCaps | None = None,
    scheme: str | None = None,
) -> SimulationResult:
    """Sampled average fidelity of any strategy; identical for identical seeds."""
    if isinstance(strategy, TwoStagePlan):
        from qlocal.simulate.two_stage import simulate_two_stage

        return simulate_two_stage(strategy, trials, seed, threads=threads, block_size=block_size, scheme=scheme)

    resolved = prior or default_prior(strategy)
    rule = _resolve_rule(guess, resolved, strategy)
    if isinstance(strategy, FixedAxesPlan):
        if strategy.prior is not resolved:
            raise PlanError(f"a {len(strategy.axes)}-axis plan cannot run under the {resolved.value} prior")
        sampler = fixed_axes_sampler(strategy, resolved, rule, caps)
        copies = strategy.total_copies
    else:
        sampler = tree_sampler(strategy, resolved, rule, caps)
        copies = strategy.depth

    def block(size: int, rng: np.random.Generator) -> np.ndarray:
        states = sample_prior(resolved, rng, size=size)
        return overlap_fidelities(states, sampler(states, rng))

    config = SimulationConfig(trials=trials, seed=seed, block_size=block_size, threads=threads)
    mean, stderr = run_blocks(block, config)
    return SimulationResult(
        trials=trials,
        mean=mean,
        stderr=stderr,
        seed=seed,
        strategy=strategy.to_dict()["kind"],
        strategy_hash=strategy_hash(strategy),
        scheme=scheme or scheme_label(strategy, resolved, rule),
        prior=resolved,
        copies=copies,
    )


def compare_exact(
    strategy: Strategy,
    prior: Prior | None = None,
    trials: int = 100_000,
    seed: int = 0,
    guess: GuessRule | GuessKind | str | None = None,
    threads: int | None = None,
    exact_offset: float = 0.0,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> ExactComparison:
    """z-score of the sampled mean against the exact fidelity (shifted by ``exact_offset``)."""
    resolved = prior or default_prior(strategy)
    exact = evaluate_strategy(strategy, resolved, guess, threads=threads, include_outcomes=False).fidelity
    result = simulate(strategy, resolved, trials, seed, guess=guess, threads=threads, block_size=block_size)
    return ExactComparison(simulation=result, exact=exact, offset=exact_offset)


__all__ = ["Sampler", "tree_sampler", "fixed_axes_sampler", "scheme_label", "simulate", "compare_exact"]
