from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
from scipy.stats import binom

from qlocal.core.bloch import UNIT_TOLERANCE, Prior
from qlocal.errors import CapExceededError, DimensionMismatchError
from qlocal.evaluate.models import EvaluationCaps, FidelityReport, OutcomeRecord
from qlocal.evaluate.tree import PROBABILITY_TOLERANCE
from qlocal.moments.quadrature import SphereQuadrature
from qlocal.strategy.guesses import ConstantGuess, GuessKind, GuessRule, OptimalGuess, default_tiebreak
from qlocal.strategy.models import FixedAxesPlan


@dataclass(frozen=True, slots=True)
class FixedAxesTables:
    """Probabilities and posterior vectors for every frequency tuple of a plan.

    Arrays are indexed by plus-counts, one index per axis: ``probabilities``
    has shape (R+1,)*A and ``posteriors`` shape (R+1,)*A + (3,), in the
    global frame.
    """

    plan: FixedAxesPlan
    probabilities: np.ndarray
    posteriors: np.ndarray

    @property
    def posterior_norms(self) -> np.ndarray:
        return np.linalg.norm(self.posteriors, axis=-1)

    def optimal_guesses(self, tiebreak: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return optimal_guess_table(self.posteriors, tiebreak)

    def tomographic_guesses(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized frequency-difference guesses; balanced tuples fall back to the first axis."""
        reps = self.plan.repetitions
        count = len(self.plan.axes)
        differences = 2.0 * np.arange(reps + 1) / reps - 1.0
        grids = np.meshgrid(*([differences] * count), indexing="ij")
        local = np.stack(grids, axis=-1)
        raw = local @ self.plan.axis_matrix
        norms = np.linalg.norm(raw, axis=-1)
        ties = norms <= UNIT_TOLERANCE
        safe = np.where(ties, 1.0, norms)
        guesses = np.where(ties[..., None], self.plan.axis_matrix[0], raw / safe[..., None])
        return guesses, ties


def check_plan(plan: FixedAxesPlan, prior: Prior, caps: EvaluationCaps | None = None) -> None:
    if plan.prior is not prior:
        raise DimensionMismatchError(f"a {len(plan.axes)}-axis plan cannot be evaluated under the {prior.value} prior")
    limits = caps or EvaluationCaps()
    cap = limits.repetitions_cap(prior)
    if plan.repetitions > cap:
        raise CapExceededError(
            f"{plan.repetitions} repetitions per axis exceeds the {prior.value} exact-evaluation cap {cap}; "
            "use `simulate` instead",
            limit=cap,
            requested=plan.repetitions,
        )


def axis_count_tables(
    repetitions: Sequence[int], axis_matrix: np.ndarray, prior: Prior
) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and posterior vectors indexed by plus-counts, one axis per entry of ``repetitions``.

    Every outcome polynomial factorizes into one binomial weight per axis, so
    the rule contracts per-axis tables B_i[k, q] = Pr(k plus | node q). All
    factors are non-negative, which keeps large repetition counts stable.
    Axes may carry different repetition counts.
    """
    reps = tuple(int(r) for r in repetitions)
    count = len(reps)
    rule = SphereQuadrature.for_degree(sum(reps) + 1, prior)
    coords = rule.nodes[:, :count]
    tables = [
        binom.pmf(np.arange(reps[axis] + 1)[:, None], reps[axis], 0.5 * (1.0 + coords[None, :, axis]))
        for axis in range(count)
    ]
    weightings = np.concatenate([rule.weights[None, :], rule.weights[None, :] * coords.T])

    if count == 2:
        contracted = (weightings[:, None, :] * tables[0][None]) @ tables[1].T
    else:
        contracted = np.empty((weightings.shape[0], reps[0] + 1, reps[1] + 1, reps[2] + 1))
        for first in range(reps[0] + 1):
            stacked = weightings * tables[0][first]
            contracted[:, first] = (stacked[:, None, :] * tables[1][None]) @ tables[2].T

    probabilities = contracted[0]
    posteriors = np.moveaxis(contracted[1:], 0, -1) @ axis_matrix
    probabilities.setflags(write=False)
    posteriors.setflags(write=False)
    return probabilities, posteriors


def optimal_guess_table(posteriors: np.ndarray, tiebreak: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit posterior directions, with ``tiebreak`` wherever the posterior vanishes."""
    norms = np.linalg.norm(posteriors, axis=-1)
    nonzero = norms > UNIT_TOLERANCE
    safe = np.where(nonzero, norms, 1.0)
    guesses = np.where(nonzero[..., None], posteriors / safe[..., None], np.asarray(tiebreak, dtype=float))
    return guesses, ~nonzero


def fixed_axes_posteriors(plan: FixedAxesPlan, prior: Prior | None = None, caps: EvaluationCaps | None = None) -> FixedAxesTables:
    """Exact tables by quadrature in the frame of the plan axes."""
    resolved = prior or plan.prior
    check_plan(plan, resolved, caps)
    probabilities, posteriors = axis_count_tables(
        (plan.repetitions,) * len(plan.axes), plan.axis_matrix, resolved
    )
    return FixedAxesTables(plan=plan, probabilities=probabilities, posteriors=posteriors)


def _outcome_label(index: tuple[int, ...]) -> str:
    return ":".join(str(k) for k in index)


def eval_fixed_axes(
    plan: FixedAxesPlan,
    guess: GuessRule | GuessKind | str | None = None,
    prior: Prior | None = None,
    caps: EvaluationCaps | None = None,
    include_outcomes: bool = True,
) -> FidelityReport:
    """Exact fidelity of a fixed-axes plan, aggregated over frequency tuples.

    Outcome ids are the plus-counts per axis joined by ``:``.
    """
    resolved = prior or plan.prior
    tables = fixed_axes_posteriors(plan, resolved, caps)
    if guess is None or isinstance(guess, (str, GuessKind)):
        kind = GuessKind.parse(guess or GuessKind.OPTIMAL)
        rule = None
    else:
        kind = guess.kind
        rule = guess

    notes: list[str] = []
    if kind is GuessKind.OPTIMAL:
        tiebreak = rule.tiebreak if isinstance(rule, OptimalGuess) else default_tiebreak(resolved)
        guesses, ties = tables.optimal_guesses(tiebreak.array)
        scores = tables.posterior_norms
        if np.any(ties):
            notes.append(f"{int(np.sum(ties))} outcome(s) with V = 0 used the tie-break guess")
    elif kind is GuessKind.TOMOGRAPHIC:
        guesses, ties = tables.tomographic_guesses()
        scores = np.sum(tables.posteriors * guesses, axis=-1)
        if np.any(ties):
            notes.append(f"{int(np.sum(ties))} balanced outcome(s) used the first plan axis as guess")
    else:
        if not isinstance(rule, ConstantGuess):
            raise ValueError("a constant guess rule needs a ConstantGuess instance")
        guesses = np.broadcast_to(rule.vector.array, tables.posteriors.shape)
        ties = np.zeros(tables.probabilities.shape, dtype=bool)
        scores = np.sum(tables.posteriors * guesses, axis=-1)

    total_probability = float(np.sum(tables.probabilities))
    score_sum = float(np.sum(scores))
    if abs(total_probability - 1.0) > PROBABILITY_TOLERANCE:
        notes.append(f"outcome probabilities sum to {total_probability:.15g}")

    outcomes: tuple[OutcomeRecord, ...] = ()
    if include_outcomes:
        norms = tables.posterior_norms
        outcomes = tuple(
            OutcomeRecord(
                outcome=_outcome_label(index),
                probability=float(tables.probabilities[index]),
                posterior_norm=float(norms[index]),
                guess=(float(guesses[index][0]), float(guesses[index][1]), float(guesses[index][2])),
                score=float(scores[index]),
                tie_break=bool(ties[index]),
            )
            for index in product(range(plan.repetitions + 1), repeat=len(plan.axes))
        )

    return FidelityReport(
        copies=plan.total_copies,
        fidelity=0.5 * (1.0 + score_sum),
        prior=resolved,
        strategy="fixed-axes",
        guess_rule=kind.value,
        total_probability=total_probability,
        score_sum=score_sum,
        outcomes=outcomes,
        notes=tuple(notes),
    )


__all__ = [
    "FixedAxesTables",
    "check_plan",
    "axis_count_tables",
    "optimal_guess_table",
    "fixed_axes_posteriors",
    "eval_fixed_axes",
]
