from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from qlocal.core.bloch import Prior, sample_prior
from qlocal.errors import CapExceededError
from qlocal.evaluate.fixed_axes import axis_count_tables, optimal_guess_table
from qlocal.evaluate.models import EvaluationCaps
from qlocal.simulate.blocks import overlap_fidelities, run_blocks
from qlocal.simulate.models import DEFAULT_BLOCK_SIZE, SimulationConfig, SimulationResult
from qlocal.strategy.guesses import default_tiebreak, orthonormal_completion_array, two_stage_guess_array
from qlocal.strategy.models import TwoStagePlan
from qlocal.strategy.serialization import strategy_hash


@dataclass(frozen=True, slots=True)
class FirstStage:
    """Exact optimal-guess lookup of the x, y, z first stage, indexed by plus-counts."""

    repetitions: tuple[int, ...]
    guesses: np.ndarray
    fidelity: float


def first_stage(plan: TwoStagePlan, caps: EvaluationCaps | None = None) -> FirstStage:
    reps = plan.first_stage_repetitions
    cap = (caps or EvaluationCaps()).repetitions_cap(Prior.SPHERE_3D)
    if max(reps) > cap:
        raise CapExceededError(
            f"first stage of {plan.first_stage_copies} copies exceeds the exact-evaluation cap of {cap} per axis",
            limit=cap,
            requested=max(reps),
        )
    _, posteriors = axis_count_tables(reps, np.eye(3), Prior.SPHERE_3D)
    guesses, _ = optimal_guess_table(posteriors, default_tiebreak(Prior.SPHERE_3D).array)
    score = float(np.sum(np.linalg.norm(posteriors, axis=-1)))
    return FirstStage(repetitions=reps, guesses=guesses, fidelity=0.5 * (1.0 + score))


def first_stage_fidelity(plan: TwoStagePlan) -> float:
    """Exact fidelity F0 of the optimal-guess fixed-axes first stage."""
    return first_stage(plan).fidelity


def two_stage_estimate(first_fidelity: float, copies: int, first_copies: int, lam: float) -> float:
    """Leading-order fidelity of the two-stage scheme; subleading terms are dropped."""
    rough = 1.0 - first_fidelity
    second = copies - first_copies
    return 1.0 - (1.0 - lam) ** 2 * rough - lam**2 * (1.0 - 4.0 * rough) / second


def optimal_lambda(first_fidelity: float, copies: int, first_copies: int) -> float:
    """Maximizer of :func:`two_stage_estimate` over lambda."""
    rough = 1.0 - first_fidelity
    return rough / (rough + (1.0 - 4.0 * rough) / (copies - first_copies))


def simulate_two_stage(
    plan: TwoStagePlan,
    trials: int,
    seed: int,
    threads: int | None = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
    scheme: str | None = None,
) -> SimulationResult:
    """Rough fixed-axes estimate M0, then two axes orthogonal to it.

    Stage one measures the x, y, z split of N0 and takes the optimal guess;
    stage two measures (N - N0)/2 copies along each of u and v, the
    deterministic completion of M0, and rotates M0 towards them.
    """
    stage = first_stage(plan)
    lookup = stage.guesses
    first_reps = np.asarray(stage.repetitions)
    second_reps = plan.second_stage_repetitions

    def block(size: int, rng: np.random.Generator) -> np.ndarray:
        states = sample_prior(Prior.SPHERE_3D, rng, size=size)
        counts = rng.binomial(first_reps, np.clip(0.5 * (1.0 + states), 0.0, 1.0))
        rough = lookup[tuple(counts.T)]
        u, v = orthonormal_completion_array(rough)
        plus_u = rng.binomial(second_reps, np.clip(0.5 * (1.0 + np.einsum("ij,ij->i", u, states)), 0.0, 1.0))
        plus_v = rng.binomial(second_reps, np.clip(0.5 * (1.0 + np.einsum("ij,ij->i", v, states)), 0.0, 1.0))
        guesses = two_stage_guess_array(rough, u, v, plus_u / second_reps, plus_v / second_reps, plan.lam)
        return overlap_fidelities(states, guesses)

    config = SimulationConfig(trials=trials, seed=seed, block_size=block_size, threads=threads)
    mean, stderr = run_blocks(block, config)
    return SimulationResult(
        trials=trials,
        mean=mean,
        stderr=stderr,
        seed=seed,
        strategy="two-stage",
        strategy_hash=strategy_hash(plan),
        scheme=scheme or "two-stage",
        prior=Prior.SPHERE_3D,
        copies=plan.total_copies,
        notes=(f"N0={plan.first_stage_copies}, lambda={plan.lam:g}, effective beta={plan.effective_beta:.4f}",),
    )


@dataclass(frozen=True, slots=True)
class LambdaSweep:
    plan: TwoStagePlan
    first_fidelity: float
    results: tuple[SimulationResult, ...]
    lambdas: tuple[float, ...]

    @property
    def best_lambda(self) -> float:
        best = max(range(len(self.results)), key=lambda i: (self.results[i].mean, -i))
        return self.lambdas[best]

    @property
    def predicted_lambda(self) -> float:
        return optimal_lambda(self.first_fidelity, self.plan.total_copies, self.plan.first_stage_copies)

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.plan.total_copies,
            "n0": self.plan.first_stage_copies,
            "first_fidelity": self.first_fidelity,
            "best_lambda": self.best_lambda,
            "predicted_lambda": self.predicted_lambda,
            "points": [
                {
                    "lambda": lam,
                    "mean": result.mean,
                    "stderr": result.stderr,
                    "estimate": two_stage_estimate(
                        self.first_fidelity, self.plan.total_copies, self.plan.first_stage_copies, lam
                    ),
                }
                for lam, result in zip(self.lambdas, self.results)
            ],
        }


def sweep_lambda(
    plan: TwoStagePlan,
    lambdas: Iterable[float],
    trials: int,
    seed: int,
    threads: int | None = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> LambdaSweep:
    """Simulate each lambda with the same seed, so every point sees the same states and counts."""
    values = tuple(float(lam) for lam in lambdas)
    if not values:
        raise ValueError("lambda sweep needs at least one value")
    results = tuple(
        simulate_two_stage(plan.with_lambda(lam), trials, seed, threads=threads, block_size=block_size) for lam in values
    )
    return LambdaSweep(plan=plan, first_fidelity=first_stage_fidelity(plan), results=results, lambdas=values)


__all__ = [
    "FirstStage",
    "first_stage",
    "first_stage_fidelity",
    "two_stage_estimate",
    "optimal_lambda",
    "simulate_two_stage",
    "LambdaSweep",
    "sweep_lambda",
]
