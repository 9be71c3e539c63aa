from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qlocal.core.bloch import UNIT_TOLERANCE, Prior
from qlocal.errors import CapExceededError, DimensionMismatchError
from qlocal.evaluate.models import EvaluationCaps, FidelityReport, OutcomeRecord
from qlocal.moments.polynomial import PosteriorVector, integrate_cubes, multiply_cubes, posterior_cubes
from qlocal.strategy.guesses import GuessKind, GuessRule, OptimalGuess, default_tiebreak
from qlocal.strategy.models import AdaptiveTree
from qlocal.utils.runtime import map_ordered

PROBABILITY_TOLERANCE = 1e-10
# Subtrees below this many levels are expanded in one vectorized pass.
_LEVELS_PER_CHUNK = 10


@dataclass(frozen=True, slots=True)
class LeafTable:
    """Outcome probabilities and posterior vectors for every leaf, by int(x, 2)."""

    depth: int
    probabilities: np.ndarray
    posteriors: np.ndarray

    @property
    def posterior_norms(self) -> np.ndarray:
        return np.linalg.norm(self.posteriors, axis=1)

    def outcome(self, index: int) -> str:
        return format(index, f"0{self.depth}b")


def check_tree(tree: AdaptiveTree, prior: Prior, caps: EvaluationCaps | None = None) -> None:
    limits = caps or EvaluationCaps()
    if tree.depth > limits.max_tree_depth:
        raise CapExceededError(
            f"tree depth {tree.depth} exceeds the exact-evaluation cap {limits.max_tree_depth}; use `simulate` instead",
            limit=limits.max_tree_depth,
            requested=tree.depth,
        )
    if prior is Prior.CIRCLE_2D and not tree.is_planar:
        raise DimensionMismatchError("2D evaluation needs every node direction in the x-y plane")


def leaf_table(
    tree: AdaptiveTree,
    prior: Prior,
    caps: EvaluationCaps | None = None,
    threads: int | None = None,
) -> LeafTable:
    """Walk the tree level by level, one linear factor per level.

    The top levels are expanded once; every node at the split level then
    roots an independent chunk whose leaves land at fixed positions, so the
    result does not depend on the worker count.
    """
    check_tree(tree, prior, caps)
    depth = tree.depth
    side = depth + 1
    split = max(0, depth - _LEVELS_PER_CHUNK)

    top = np.zeros((1, side, side, side))
    top[0, 0, 0, 0] = 1.0
    for level in range(split):
        directions = tree.level_directions(level)
        top = np.concatenate([multiply_cubes(top, directions), multiply_cubes(top, -directions)])

    def expand(root: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cubes = top[root : root + 1]
        history = np.array([root])
        for level in range(split, depth):
            directions = tree.directions[(1 << level) - 1 + history]
            cubes = np.concatenate([multiply_cubes(cubes, directions), multiply_cubes(cubes, -directions)])
            history = np.concatenate([history, history + (1 << level)])
        return history, integrate_cubes(cubes, prior), posterior_cubes(cubes, prior)

    probabilities = np.zeros(1 << depth)
    posteriors = np.zeros((1 << depth, 3))
    for leaves, probs, vectors in map_ordered(expand, range(top.shape[0]), threads=threads):
        probabilities[leaves] = probs
        posteriors[leaves] = vectors
    return LeafTable(depth=depth, probabilities=probabilities, posteriors=posteriors)


def eval_adaptive_tree(
    tree: AdaptiveTree,
    prior: Prior,
    guess: GuessRule | None = None,
    caps: EvaluationCaps | None = None,
    threads: int | None = None,
    include_outcomes: bool = True,
    strategy: str = "adaptive-tree",
) -> FidelityReport:
    table = leaf_table(tree, prior, caps=caps, threads=threads)
    rule = guess if guess is not None else OptimalGuess.for_prior(prior)
    norms = table.posterior_norms
    notes: list[str] = []

    if rule.kind is GuessKind.OPTIMAL:
        tiebreak = (rule.tiebreak if isinstance(rule, OptimalGuess) else default_tiebreak(prior)).array
        nonzero = norms > UNIT_TOLERANCE
        safe = np.where(nonzero, norms, 1.0)
        guesses = np.where(nonzero[:, None], table.posteriors / safe[:, None], tiebreak[None, :])
        scores = norms
        ties = ~nonzero
    else:
        guesses = np.empty_like(table.posteriors)
        ties = np.zeros(norms.shape[0], dtype=bool)
        is_tie = getattr(rule, "is_tie", None)
        for index in range(norms.shape[0]):
            outcome = table.outcome(index)
            posterior = PosteriorVector.from_array(table.posteriors[index])
            guesses[index] = rule.guess(outcome, posterior).array
            if is_tie is not None:
                ties[index] = bool(is_tie(outcome))
        scores = np.sum(table.posteriors * guesses, axis=1)

    total_probability = float(np.sum(table.probabilities))
    score_sum = float(np.sum(scores))
    if abs(total_probability - 1.0) > PROBABILITY_TOLERANCE:
        notes.append(f"outcome probabilities sum to {total_probability:.15g}")
    if np.any(ties):
        notes.append(f"{int(np.sum(ties))} outcome(s) used the tie-break guess")

    outcomes: tuple[OutcomeRecord, ...] = ()
    if include_outcomes:
        outcomes = tuple(
            OutcomeRecord(
                outcome=table.outcome(index),
                probability=float(table.probabilities[index]),
                posterior_norm=float(norms[index]),
                guess=(float(guesses[index, 0]), float(guesses[index, 1]), float(guesses[index, 2])),
                score=float(scores[index]),
                tie_break=bool(ties[index]),
            )
            for index in range(norms.shape[0])
        )

    return FidelityReport(
        copies=tree.depth,
        fidelity=0.5 * (1.0 + score_sum),
        prior=prior,
        strategy=strategy,
        guess_rule=rule.kind.value,
        total_probability=total_probability,
        score_sum=score_sum,
        outcomes=outcomes,
        notes=tuple(notes),
    )


__all__ = ["PROBABILITY_TOLERANCE", "LeafTable", "check_tree", "leaf_table", "eval_adaptive_tree"]
