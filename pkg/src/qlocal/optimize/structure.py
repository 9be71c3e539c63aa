from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from qlocal.core.bloch import UNIT_TOLERANCE, BlochVector, Prior, normalize, rotation_matrix
from qlocal.moments.polynomial import SpherePolynomial, multiply_linear_factor, posterior_vector
from qlocal.strategy.guesses import default_tiebreak, optimal_guess, orthonormal_completion_array
from qlocal.strategy.models import AdaptiveTree

CANONICAL_TOLERANCE_DEG = 0.5
LINE_TOLERANCE_DEG = 1e-3


def tree_prior(tree: AdaptiveTree, prior: Prior | None = None) -> Prior:
    """``prior`` when given; otherwise the circle for planar trees and the sphere for the rest."""
    if prior is not None:
        return prior
    return Prior.CIRCLE_2D if tree.is_planar else Prior.SPHERE_3D


def prefix_guess(tree: AdaptiveTree, history: str, prior: Prior | None = None) -> BlochVector | None:
    """Optimal guess after the measurements of ``history``; None while V vanishes."""
    resolved = tree_prior(tree, prior)
    poly = SpherePolynomial.constant()
    level = len(history)
    for step in range(1, level + 1):
        bit = history[level - step]
        direction = tree.direction(history[level - step + 1 :])
        poly = multiply_linear_factor(poly, -direction if bit == "1" else direction)
    posterior = posterior_vector(poly, resolved)
    if posterior.is_zero:
        return None
    return normalize(posterior.array, dim=resolved.dimension)


def optimal_guess_vector(tree: AdaptiveTree, outcome: str, prior: Prior | None = None) -> BlochVector:
    """V(x)/|V(x)| for a full outcome string, newest outcome leftmost."""
    if len(outcome) != tree.depth:
        raise ValueError(f"outcome must have {tree.depth} bits, got {len(outcome)}")
    resolved = tree_prior(tree, prior)
    poly = SpherePolynomial.constant()
    for row in tree.path_directions(outcome):
        poly = multiply_linear_factor(poly, BlochVector.from_array(row))
    return optimal_guess(posterior_vector(poly, resolved), default_tiebreak(resolved))


def weighted_sum_guess(tree: AdaptiveTree, outcome: str, prior: Prior | None = None) -> BlochVector | None:
    """Normalized sum of the outcome-signed directions along the path; None when they cancel."""
    total = tree.path_directions(outcome).sum(axis=0)
    if np.linalg.norm(total) <= UNIT_TOLERANCE:
        return None
    return normalize(total, dim=tree_prior(tree, prior).dimension)


def sum_guess_deviation_deg(tree: AdaptiveTree, prior: Prior | None = None) -> float:
    """Largest angle between the optimal guess and the normalized direction sum over all outcomes.

    Zero up to roundoff for N <= 3 optimal trees, whose best guess is the sum.
    """
    resolved = tree_prior(tree, prior)
    worst = 0.0
    for outcome in AdaptiveTree.histories(tree.depth):
        summed = weighted_sum_guess(tree, outcome, resolved)
        if summed is None:
            continue
        best = optimal_guess_vector(tree, outcome, resolved)
        worst = max(worst, math.degrees(math.acos(max(-1.0, min(1.0, best.dot(summed))))))
    return worst


@dataclass(frozen=True, slots=True)
class StepStructure:
    step: int
    guess_angle_min_deg: float | None
    guess_angle_max_deg: float | None
    guess_angle_mean_deg: float | None
    max_same_depth_angle_deg: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "guess_angle_min_deg": self.guess_angle_min_deg,
            "guess_angle_max_deg": self.guess_angle_max_deg,
            "guess_angle_mean_deg": self.guess_angle_mean_deg,
            "max_same_depth_angle_deg": self.max_same_depth_angle_deg,
        }


@dataclass(frozen=True, slots=True)
class StructureReport:
    """Geometry of a measurement tree.

    ``literal_history_independent`` holds when every step measures the same
    axis whatever came before. After the first outcome the prior is still
    symmetric about the root axis, so each depth-1 subtree may be spun about
    it freely; ``canonical_history_independent`` repeats the check after
    undoing that spin. ``max_sum_guess_deviation_deg`` measures how far the
    optimal guess strays from the normalized sum of measured directions.
    """

    depth: int
    steps: tuple[StepStructure, ...]
    literal_history_independent: bool
    canonical_history_independent: bool
    max_canonical_spread_deg: float
    max_sum_guess_deviation_deg: float = 0.0
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def history_dependent(self) -> bool:
        return not self.canonical_history_independent

    def to_dict(self) -> dict[str, Any]:
        return {
            "depth": self.depth,
            "history_dependent": self.history_dependent,
            "literal_history_independent": self.literal_history_independent,
            "canonical_history_independent": self.canonical_history_independent,
            "max_canonical_spread_deg": self.max_canonical_spread_deg,
            "max_sum_guess_deviation_deg": self.max_sum_guess_deviation_deg,
            "steps": [step.to_dict() for step in self.steps],
            "notes": list(self.notes),
        }


def _line_angle_deg(a: np.ndarray, b: np.ndarray) -> float:
    return math.degrees(math.acos(min(1.0, abs(float(np.dot(a, b))))))


def _level_spread_deg(rows: np.ndarray) -> float:
    return max((_line_angle_deg(a, b) for a, b in combinations(rows, 2)), default=0.0)


def canonical_directions(tree: AdaptiveTree, prior: Prior = Prior.SPHERE_3D) -> np.ndarray:
    """Spin each depth-1 subtree about the root axis so its first node faces a fixed reference.

    Planar trees keep their directions: the circle prior leaves no continuous
    freedom after the first outcome.
    """
    rows = np.array(tree.directions)
    if tree.depth < 2 or prior is Prior.CIRCLE_2D:
        return rows
    root = rows[0]
    reference = orthonormal_completion_array(root[None, :])[0][0]
    for bit in (0, 1):
        node = rows[1 + bit]
        projected = node - np.dot(node, root) * root
        if np.linalg.norm(projected) < 1e-9:
            continue
        angle = math.atan2(float(np.dot(np.cross(projected, reference), root)), float(np.dot(projected, reference)))
        spin = rotation_matrix(root, angle)
        for level in range(1, tree.depth):
            start = (1 << level) - 1
            members = start + np.flatnonzero((np.arange(1 << level) & 1) == bit)
            rows[members] = rows[members] @ spin.T
    return rows


def structure_report(tree: AdaptiveTree, prior: Prior | None = None) -> StructureReport:
    resolved = tree_prior(tree, prior)
    steps = []
    for level in range(tree.depth):
        angles = []
        for history in AdaptiveTree.histories(level):
            guess = prefix_guess(tree, history, resolved) if level else None
            if guess is not None:
                row = tree.directions[AdaptiveTree.node_index(history)]
                angles.append(math.degrees(math.acos(max(-1.0, min(1.0, float(np.dot(row, guess.array)))))))
        steps.append(
            StepStructure(
                step=level + 1,
                guess_angle_min_deg=min(angles) if angles else None,
                guess_angle_max_deg=max(angles) if angles else None,
                guess_angle_mean_deg=float(np.mean(angles)) if angles else None,
                max_same_depth_angle_deg=_level_spread_deg(tree.level_directions(level)),
            )
        )

    literal = all(step.max_same_depth_angle_deg <= LINE_TOLERANCE_DEG for step in steps)
    canonical = canonical_directions(tree, resolved)
    spread = max(
        _level_spread_deg(canonical[(1 << level) - 1 : (1 << (level + 1)) - 1]) for level in range(tree.depth)
    )
    notes: list[str] = []
    if not literal and spread <= CANONICAL_TOLERANCE_DEG:
        notes.append("node directions differ only by spins about the root axis")

    return StructureReport(
        depth=tree.depth,
        steps=tuple(steps),
        literal_history_independent=literal,
        canonical_history_independent=spread <= CANONICAL_TOLERANCE_DEG,
        max_canonical_spread_deg=spread,
        max_sum_guess_deviation_deg=sum_guess_deviation_deg(tree, resolved),
        notes=tuple(notes),
    )


__all__ = [
    "CANONICAL_TOLERANCE_DEG",
    "StepStructure",
    "StructureReport",
    "tree_prior",
    "prefix_guess",
    "optimal_guess_vector",
    "weighted_sum_guess",
    "sum_guess_deviation_deg",
    "canonical_directions",
    "structure_report",
]
