from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qlocal.core.bloch import Prior
from qlocal.moments.quadrature import SphereQuadrature
from qlocal.strategy.models import AdaptiveTree, angles_to_directions


@dataclass(frozen=True, slots=True)
class TreeObjective:
    """Average fidelity of a depth-N tree as a function of free node angles.

    3D nodes carry (theta, phi), 2D nodes carry phi only. Every leaf
    polynomial has degree N, so V(x) is integrated exactly by a rule of
    degree N + 1 and all leaves are evaluated in one vectorized pass.
    """

    depth: int
    prior: Prior
    gauge_fixed: bool = True
    rule: SphereQuadrature = field(init=False)

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        object.__setattr__(self, "rule", SphereQuadrature.for_degree(self.depth + 1, self.prior))

    @property
    def node_count(self) -> int:
        return (1 << self.depth) - 1

    @property
    def planar(self) -> bool:
        return self.prior is Prior.CIRCLE_2D

    @property
    def size(self) -> int:
        if self.planar:
            return self.node_count - (1 if self.gauge_fixed else 0)
        fixed = (2 + (1 if self.depth > 1 else 0)) if self.gauge_fixed else 0
        return 2 * self.node_count - fixed

    def angles(self, params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Full per-node (theta, phi) arrays with the gauge entries filled in."""
        values = np.asarray(params, dtype=float)
        count = self.node_count
        if self.planar:
            phi = np.concatenate([[0.0], values]) if self.gauge_fixed else values
            return np.full(count, 0.5 * math.pi), phi
        if not self.gauge_fixed:
            return values[:count], values[count:]
        # root is z; node "0" (row 1) keeps phi = 0
        theta = np.concatenate([[0.0], values[: count - 1]])
        rest = values[count - 1 :]
        if self.depth > 1:
            phi = np.concatenate([[0.0, 0.0], rest])
        else:
            phi = np.zeros(1)
        return theta, phi

    def directions(self, params: np.ndarray) -> np.ndarray:
        theta, phi = self.angles(params)
        rows = angles_to_directions(theta, phi)
        if self.planar:
            rows[:, 2] = 0.0
        return rows

    def parameters_for(self, directions: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`directions`; gauge entries are dropped, not checked."""
        rows = np.asarray(directions, dtype=float)
        theta = np.arccos(np.clip(rows[:, 2], -1.0, 1.0))
        phi = np.arctan2(rows[:, 1], rows[:, 0])
        if self.planar:
            return phi[1:] if self.gauge_fixed else phi
        if not self.gauge_fixed:
            return np.concatenate([theta, phi])
        return np.concatenate([theta[1:], phi[2:]])

    def tree(self, params: np.ndarray) -> AdaptiveTree:
        return AdaptiveTree(self.depth, self.directions(params))

    def leaf_posteriors(self, directions: np.ndarray) -> np.ndarray:
        nodes = self.rule.nodes
        weights = np.ones((1, nodes.shape[0]))
        for level in range(self.depth):
            start = (1 << level) - 1
            t = directions[start : start + (1 << level)] @ nodes.T
            weights = np.concatenate([weights * (0.5 * (1.0 + t)), weights * (0.5 * (1.0 - t))])
        return (weights * self.rule.weights) @ nodes

    def fidelity(self, params: np.ndarray) -> float:
        posteriors = self.leaf_posteriors(self.directions(params))
        return 0.5 * (1.0 + float(np.sum(np.linalg.norm(posteriors, axis=1))))

    def smallest_posterior(self, params: np.ndarray) -> float:
        return float(np.min(np.linalg.norm(self.leaf_posteriors(self.directions(params)), axis=1)))

    def __call__(self, params: np.ndarray) -> float:
        return -self.fidelity(params)


__all__ = ["TreeObjective"]
