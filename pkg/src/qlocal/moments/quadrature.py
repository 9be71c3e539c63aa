from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from qlocal.core.bloch import Prior


@dataclass(frozen=True, slots=True)
class SphereQuadrature:
    """Positive-weight rule exact for polynomials in the Bloch components.

    On the sphere: Gauss-Legendre in cos(theta) times the trapezoid rule in
    phi. On the circle: the trapezoid rule alone. ``degree`` is the highest
    total degree integrated exactly.
    """

    prior: Prior
    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @classmethod
    def for_degree(cls, degree: int, prior: Prior) -> "SphereQuadrature":
        return _cached_rule(int(degree), prior)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate sampled values; the last axis runs over the nodes."""
        return np.asarray(values) @ self.weights


@lru_cache(maxsize=64)
def _cached_rule(degree: int, prior: Prior) -> SphereQuadrature:
    if degree < 0:
        raise ValueError("degree must be >= 0")
    n_phi = degree + 1
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi

    if prior is Prior.CIRCLE_2D:
        nodes = np.stack([np.cos(phi), np.sin(phi), np.zeros(n_phi)], axis=1)
        weights = np.full(n_phi, 1.0 / n_phi)
    else:
        z, w_z = leggauss(degree // 2 + 1)
        rho = np.sqrt(1.0 - z * z)
        nodes = np.stack(
            [
                np.outer(rho, np.cos(phi)).ravel(),
                np.outer(rho, np.sin(phi)).ravel(),
                np.repeat(z, n_phi),
            ],
            axis=1,
        )
        weights = np.outer(0.5 * w_z, np.full(n_phi, 1.0 / n_phi)).ravel()

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereQuadrature(prior=prior, degree=degree, nodes=nodes, weights=weights)


def quadrature_moment(prior: Prior, p: int, q: int, r: int = 0) -> float:
    """Moment computed by quadrature; the oracle for the closed forms."""
    rule = SphereQuadrature.for_degree(p + q + r, prior)
    x, y, z = rule.nodes[:, 0], rule.nodes[:, 1], rule.nodes[:, 2]
    return float(rule.integrate(x**p * y**q * z**r))


__all__ = ["SphereQuadrature", "quadrature_moment"]
