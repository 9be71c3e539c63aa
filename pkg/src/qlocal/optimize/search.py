from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from qlocal.core.bloch import Prior, generate_seed, make_rng, spawn_seeds
from qlocal.errors import CapExceededError
from qlocal.evaluate.tree import eval_adaptive_tree
from qlocal.optimize.models import OptimizationConfig, OptimizationResult, RestartOutcome
from qlocal.optimize.objective import TreeObjective
from qlocal.strategy.guesses import orthonormal_completion_array
from qlocal.strategy.models import AdaptiveTree
from qlocal.utils.runtime import map_ordered

LANDSCAPE_TOLERANCE = 1e-5
REFINE_MIN_POSTERIOR = 1e-6
_DEGENERATE = 1e-9


def heuristic_directions(depth: int, prior: Prior) -> np.ndarray:
    """Orthogonal-axes initialization.

    Each node is taken orthogonal to the running sum of the signed directions
    of its history and to the last signed direction. 2D nodes are the
    in-plane perpendicular of that running sum.
    """
    count = (1 << depth) - 1
    rows = np.zeros((count, 3))
    rows[0] = [1.0, 0.0, 0.0] if prior is Prior.CIRCLE_2D else [0.0, 0.0, 1.0]
    for level in range(1, depth):
        for history in AdaptiveTree.histories(level):
            signed = np.array(
                [
                    (-1.0 if history[level - step] == "1" else 1.0)
                    * rows[AdaptiveTree.node_index(history[level - step + 1 :])]
                    for step in range(1, level + 1)
                ]
            )
            running = signed.sum(axis=0)
            if np.linalg.norm(running) < _DEGENERATE:
                running = signed[-1]
            running = running / np.linalg.norm(running)
            if prior is Prior.CIRCLE_2D:
                candidate = np.array([-running[1], running[0], 0.0])
            else:
                candidate = np.cross(running, signed[-1])
                if np.linalg.norm(candidate) < _DEGENERATE:
                    candidate = orthonormal_completion_array(running[None, :])[0][0]
            rows[AdaptiveTree.node_index(history)] = candidate / np.linalg.norm(candidate)
    return rows


def random_parameters(objective: TreeObjective, rng: np.random.Generator) -> np.ndarray:
    count = objective.node_count
    phi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    if objective.planar:
        rows = np.stack([np.cos(phi), np.sin(phi), np.zeros(count)], axis=1)
    else:
        theta = np.arccos(rng.uniform(-1.0, 1.0, size=count))
        rows = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)
    return objective.parameters_for(rows)


def run_restart(
    objective: TreeObjective,
    start: np.ndarray,
    config: OptimizationConfig,
    index: int = 0,
    initializer: str = "heuristic",
) -> RestartOutcome:
    """Simplex descent restarted from its own optimum until a pass gains no more than the tolerance."""
    x = np.asarray(start, dtype=float)
    history: list[float] = [objective.fidelity(x)]
    if objective.size == 0:
        return RestartOutcome(index, initializer, history[0], tuple(x), tuple(history), 0, True)

    def record(xk: np.ndarray) -> None:
        history.append(objective.fidelity(xk))

    best = objective(x)
    remaining = config.max_iterations
    iterations = 0
    converged = False
    while remaining > 0:
        result = minimize(
            objective,
            x,
            method="Nelder-Mead",
            callback=record,
            options={
                "maxiter": remaining,
                "maxfev": 4 * remaining,
                "xatol": 1e-9,
                "fatol": 0.1 * config.tolerance,
                "adaptive": True,
            },
        )
        iterations += int(result.nit)
        remaining -= max(int(result.nit), 1)
        gain = best - float(result.fun)
        if float(result.fun) <= best:
            x, best = np.asarray(result.x, dtype=float), float(result.fun)
        if result.success and gain <= config.tolerance:
            converged = True
            break

    refined = False
    if config.refine and objective.smallest_posterior(x) > REFINE_MIN_POSTERIOR:
        polish = minimize(objective, x, method="BFGS", callback=record, options={"maxiter": 500, "gtol": 1e-10})
        iterations += int(polish.nit)
        if float(polish.fun) < best:
            x, best = np.asarray(polish.x, dtype=float), float(polish.fun)
            refined = True

    return RestartOutcome(
        index=index,
        initializer=initializer,
        fidelity=-best,
        parameters=tuple(float(v) for v in x),
        history=tuple(history),
        iterations=iterations,
        converged=converged,
        refined=refined,
    )


def optimize_tree(
    depth: int,
    prior: Prior = Prior.SPHERE_3D,
    config: OptimizationConfig | None = None,
    threads: int | None = None,
) -> OptimizationResult:
    """Best tree over seeded restarts; ties between restarts go to the lowest index."""
    cfg = config or OptimizationConfig()
    if depth < 1:
        raise ValueError("N must be >= 1")
    if depth > cfg.max_depth:
        raise CapExceededError(
            f"optimizer depth {depth} exceeds the cap {cfg.max_depth}", limit=cfg.max_depth, requested=depth
        )
    seed = cfg.seed if cfg.seed is not None else generate_seed()
    objective = TreeObjective(depth, prior, gauge_fixed=cfg.gauge_fixed)
    base = objective.parameters_for(heuristic_directions(depth, prior))
    children = spawn_seeds(seed, cfg.restarts)
    heuristic_count = math.ceil(cfg.restarts * cfg.heuristic_fraction)

    def run(index: int) -> RestartOutcome:
        rng = make_rng(children[index])
        if index < heuristic_count:
            start = base.copy()
            if index > 0 and cfg.jitter > 0.0:
                start = start + rng.normal(0.0, cfg.jitter, size=start.shape)
            return run_restart(objective, start, cfg, index, "heuristic")
        return run_restart(objective, random_parameters(objective, rng), cfg, index, "random")

    outcomes = tuple(map_ordered(run, range(cfg.restarts), threads=threads))
    best_index = max(range(len(outcomes)), key=lambda i: (outcomes[i].fidelity, -i))
    best = outcomes[best_index]

    tree = objective.tree(np.asarray(best.parameters))
    report = eval_adaptive_tree(tree, prior, threads=threads, strategy="optimized-tree")

    notes: list[str] = []
    behind = [o.index for o in outcomes if best.fidelity - o.fidelity > LANDSCAPE_TOLERANCE]
    if behind:
        notes.append(f"{len(behind)} of {len(outcomes)} restart(s) ended more than {LANDSCAPE_TOLERANCE:g} below the best: {behind}")
    if not best.converged:
        notes.append(f"best restart {best_index} did not converge within {cfg.max_iterations} iterations")
    if abs(report.fidelity - best.fidelity) > 1e-9:
        notes.append(f"exact re-evaluation differs from the search objective by {report.fidelity - best.fidelity:.3e}")
    notes.extend(report.notes)

    return OptimizationResult(
        tree=tree,
        report=report,
        config=cfg,
        seed=seed,
        best_restart=best_index,
        restarts=outcomes,
        notes=tuple(notes),
    )


__all__ = [
    "LANDSCAPE_TOLERANCE",
    "heuristic_directions",
    "random_parameters",
    "run_restart",
    "optimize_tree",
]
