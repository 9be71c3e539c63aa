from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from qlocal.core.bloch import UNIT_TOLERANCE, BlochVector, Prior
from qlocal.errors import DimensionMismatchError
from qlocal.moments.tables import MomentTable


@dataclass(frozen=True, slots=True)
class SpherePolynomial:
    """Polynomial in (n_x, n_y, n_z) stored as a dense coefficient cube.

    ``coefficients[p, q, r]`` multiplies n_x^p n_y^q n_z^r. The cube has side
    ``degree + 1``; entries with p + q + r > degree are zero.
    """

    coefficients: np.ndarray
    degree: int

    def __post_init__(self) -> None:
        cube = np.array(self.coefficients, dtype=float)
        side = self.degree + 1
        if cube.ndim != 3 or cube.shape != (side, side, side):
            raise ValueError(f"coefficient cube must have shape {(side, side, side)}, got {cube.shape}")
        if not np.all(np.isfinite(cube)):
            raise ValueError("polynomial coefficients must be finite")
        cube.setflags(write=False)
        object.__setattr__(self, "coefficients", cube)

    @classmethod
    def constant(cls, value: float = 1.0) -> "SpherePolynomial":
        return cls(np.full((1, 1, 1), float(value)), degree=0)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int, int], float]) -> "SpherePolynomial":
        degree = max((sum(key) for key in terms), default=0)
        cube = np.zeros((degree + 1,) * 3)
        for (p, q, r), value in terms.items():
            if min(p, q, r) < 0:
                raise ValueError("exponents must be non-negative")
            cube[p, q, r] += float(value)
        return cls(cube, degree=degree)

    def coefficient(self, p: int, q: int, r: int = 0) -> float:
        side = self.degree + 1
        if p >= side or q >= side or r >= side:
            return 0.0
        return float(self.coefficients[p, q, r])

    def terms(self) -> dict[tuple[int, int, int], float]:
        indices = np.argwhere(self.coefficients != 0.0)
        return {(int(p), int(q), int(r)): float(self.coefficients[p, q, r]) for p, q, r in indices}

    def has_z_terms(self) -> bool:
        return bool(np.any(self.coefficients[:, :, 1:] != 0.0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "terms": [{"exponents": list(key), "coefficient": value} for key, value in sorted(self.terms().items())],
        }


@dataclass(frozen=True, slots=True)
class PosteriorVector:
    """Unnormalized prior average of n weighted by an outcome probability."""

    components: tuple[float, float, float]
    magnitude: float

    @classmethod
    def from_array(cls, values: np.ndarray) -> "PosteriorVector":
        data = np.asarray(values, dtype=float).ravel()
        return cls(
            components=(float(data[0]), float(data[1]), float(data[2])),
            magnitude=float(math.sqrt(float(data @ data))),
        )

    @property
    def array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)

    @property
    def is_zero(self) -> bool:
        return self.magnitude <= UNIT_TOLERANCE

    def to_dict(self) -> dict[str, Any]:
        return {"components": list(self.components), "magnitude": self.magnitude}


def multiply_linear_factor(poly: SpherePolynomial, m: BlochVector) -> SpherePolynomial:
    """Return poly * (1 + m . n) / 2; the degree grows by exactly one."""
    side = poly.degree + 1
    source = poly.coefficients
    grown = np.zeros((side + 1,) * 3)
    grown[:side, :side, :side] += source
    grown[1:, :side, :side] += m.x * source
    grown[:side, 1:, :side] += m.y * source
    grown[:side, :side, 1:] += m.z * source
    return SpherePolynomial(0.5 * grown, degree=poly.degree + 1)


def integrate(poly: SpherePolynomial, prior: Prior) -> float:
    _check_prior(poly.coefficients, prior)
    side = poly.degree + 1
    return float(np.sum(poly.coefficients * MomentTable.cube(prior, side)))


def posterior_vector(poly: SpherePolynomial, prior: Prior) -> PosteriorVector:
    _check_prior(poly.coefficients, prior)
    return PosteriorVector.from_array(_posterior_from_cube(poly.coefficients[None], prior)[0])


def multiply_cubes(cubes: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Apply (1 + d_b . n)/2 to a stack of fixed-size cubes.

    ``cubes`` has shape (B, S, S, S) and ``directions`` shape (B, 3). The top
    layer of every cube must be empty so the product still fits.
    """
    out = cubes.copy()
    out[:, 1:, :, :] += directions[:, 0, None, None, None] * cubes[:, :-1, :, :]
    out[:, :, 1:, :] += directions[:, 1, None, None, None] * cubes[:, :, :-1, :]
    out[:, :, :, 1:] += directions[:, 2, None, None, None] * cubes[:, :, :, :-1]
    out *= 0.5
    return out


def integrate_cubes(cubes: np.ndarray, prior: Prior) -> np.ndarray:
    _check_prior(cubes, prior)
    side = cubes.shape[-1]
    moments = MomentTable.cube(prior, side)
    return np.tensordot(cubes, moments, axes=([1, 2, 3], [0, 1, 2]))


def posterior_cubes(cubes: np.ndarray, prior: Prior) -> np.ndarray:
    _check_prior(cubes, prior)
    return _posterior_from_cube(cubes, prior)


def _posterior_from_cube(cubes: np.ndarray, prior: Prior) -> np.ndarray:
    side = cubes.shape[-1]
    moments = MomentTable.cube(prior, side + 1)
    axes = ([-3, -2, -1], [0, 1, 2])
    return np.stack(
        [
            np.tensordot(cubes, moments[1:, :side, :side], axes=axes),
            np.tensordot(cubes, moments[:side, 1:, :side], axes=axes),
            np.tensordot(cubes, moments[:side, :side, 1:], axes=axes),
        ],
        axis=-1,
    )


def _check_prior(cubes: np.ndarray, prior: Prior) -> None:
    if prior is Prior.CIRCLE_2D and np.any(cubes[..., 1:] != 0.0):
        raise DimensionMismatchError("2D prior cannot integrate terms with a non-zero n_z exponent")


__all__ = [
    "SpherePolynomial",
    "PosteriorVector",
    "multiply_linear_factor",
    "integrate",
    "posterior_vector",
    "multiply_cubes",
    "integrate_cubes",
    "posterior_cubes",
]
