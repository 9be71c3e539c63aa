from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, overload

import numpy as np

from qlocal.errors import DimensionMismatchError, NonUnitVectorError, ZeroVectorError

UNIT_TOLERANCE = 1e-12
# Inputs this close to the unit sphere are re-normalized instead of rejected.
ROUNDOFF_TOLERANCE = 1e-6
ZERO_TOLERANCE = 1e-12


class Prior(str, Enum):
    SPHERE_3D = "3d"
    CIRCLE_2D = "2d"

    @property
    def dimension(self) -> int:
        return 3 if self is Prior.SPHERE_3D else 2

    @classmethod
    def parse(cls, value: "str | Prior") -> "Prior":
        if isinstance(value, Prior):
            return value
        normalized = str(value).strip().lower()
        aliases = {
            "3d": cls.SPHERE_3D,
            "sphere": cls.SPHERE_3D,
            "2d": cls.CIRCLE_2D,
            "circle": cls.CIRCLE_2D,
            "equator": cls.CIRCLE_2D,
        }
        if normalized not in aliases:
            raise ValueError(f"Unknown prior {value!r}; expected 2d or 3d")
        return aliases[normalized]


@dataclass(frozen=True, slots=True)
class BlochVector:
    """Unit vector standing for a pure qubit state or a measurement axis.

    Two-dimensional vectors live in the x-y plane of the same representation
    (``dim == 2`` and ``z == 0`` exactly), so downstream code never branches
    on the prior for plain geometry.
    """

    x: float
    y: float
    z: float = 0.0
    dim: int = 3

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        components = (float(self.x), float(self.y), float(self.z))
        if not all(math.isfinite(value) for value in components):
            raise NonUnitVectorError("Bloch vector components must be finite")
        if self.dim == 2 and components[2] != 0.0:
            raise DimensionMismatchError("2D Bloch vectors must have a zero z component")

        norm = math.sqrt(sum(value * value for value in components))
        if abs(norm - 1.0) > ROUNDOFF_TOLERANCE:
            raise NonUnitVectorError(f"Bloch vector norm {norm:.12g} is not 1")
        object.__setattr__(self, "x", components[0] / norm)
        object.__setattr__(self, "y", components[1] / norm)
        object.__setattr__(self, "z", components[2] / norm)

    @classmethod
    def from_array(cls, values: Iterable[float] | np.ndarray, dim: int | None = None) -> "BlochVector":
        data = [float(value) for value in np.asarray(values, dtype=float).ravel()]
        if len(data) == 2:
            return cls(data[0], data[1], 0.0, dim=2 if dim is None else dim)
        if len(data) != 3:
            raise DimensionMismatchError(f"Expected 2 or 3 components, got {len(data)}")
        return cls(data[0], data[1], data[2], dim=3 if dim is None else dim)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        return cls(
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        )

    @classmethod
    def planar(cls, phi: float) -> "BlochVector":
        return cls(math.cos(phi), math.sin(phi), 0.0, dim=2)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def is_planar(self) -> bool:
        return self.z == 0.0

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def angle_to(self, other: "BlochVector") -> float:
        return math.acos(max(-1.0, min(1.0, self.dot(other))))

    def __neg__(self) -> "BlochVector":
        return BlochVector(-self.x, -self.y, -self.z, dim=self.dim)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    def to_dict(self) -> dict[str, Any]:
        return {"components": self.to_list(), "dim": self.dim}


def fidelity_overlap(n: BlochVector, M: BlochVector) -> float:
    if n.dim != M.dim:
        raise DimensionMismatchError(f"Cannot compare a {n.dim}D state with a {M.dim}D guess")
    value = 0.5 * (1.0 + n.dot(M))
    return min(1.0, max(0.0, value))


def outcome_probability(n: BlochVector, m: BlochVector, outcome: int) -> float:
    """Probability of ``outcome`` (0 for the projector on +m, 1 for -m)."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    overlap = n.dot(m)
    if outcome == 0:
        return 0.5 * (1.0 + overlap)
    return 0.5 * (1.0 - overlap)


def normalize(values: Iterable[float] | np.ndarray, dim: int | None = None) -> BlochVector:
    array = np.asarray(values, dtype=float).ravel()
    norm = float(np.linalg.norm(array))
    if not math.isfinite(norm) or norm <= ZERO_TOLERANCE:
        raise ZeroVectorError("Cannot normalize a zero vector")
    return BlochVector.from_array(array / norm, dim=dim)


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(sequence))


def spawn_seeds(seed: int | np.random.SeedSequence, count: int) -> list[np.random.SeedSequence]:
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return sequence.spawn(count)


def generate_seed() -> int:
    # 63 bits keeps the seed a plain JSON/CSV integer everywhere.
    return int(np.random.SeedSequence().entropy) & ((1 << 63) - 1)


@overload
def sample_prior(prior: Prior, rng: np.random.Generator, size: None = None) -> BlochVector: ...


@overload
def sample_prior(prior: Prior, rng: np.random.Generator, size: int) -> np.ndarray: ...


def sample_prior(prior: Prior, rng: np.random.Generator, size: int | None = None) -> BlochVector | np.ndarray:
    count = 1 if size is None else int(size)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=count)
    points = np.zeros((count, 3), dtype=float)
    if prior is Prior.SPHERE_3D:
        cos_theta = rng.uniform(-1.0, 1.0, size=count)
        sin_theta = np.sqrt(np.clip(1.0 - cos_theta * cos_theta, 0.0, None))
        points[:, 0] = sin_theta * np.cos(phi)
        points[:, 1] = sin_theta * np.sin(phi)
        points[:, 2] = cos_theta
    else:
        points[:, 0] = np.cos(phi)
        points[:, 1] = np.sin(phi)

    if size is None:
        return BlochVector.from_array(points[0], dim=prior.dimension)
    return points


def rotation_matrix(axis: Iterable[float] | np.ndarray, angle: float) -> np.ndarray:
    direction = np.asarray(axis, dtype=float)
    direction = direction / np.linalg.norm(direction)
    x, y, z = direction
    cross = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + math.sin(angle) * cross + (1.0 - math.cos(angle)) * (cross @ cross)


def rotate(vector: BlochVector, matrix: np.ndarray) -> BlochVector:
    return BlochVector.from_array(matrix @ vector.array, dim=vector.dim)


__all__ = [
    "UNIT_TOLERANCE",
    "ROUNDOFF_TOLERANCE",
    "ZERO_TOLERANCE",
    "Prior",
    "BlochVector",
    "fidelity_overlap",
    "outcome_probability",
    "normalize",
    "make_rng",
    "spawn_seeds",
    "generate_seed",
    "sample_prior",
    "rotation_matrix",
    "rotate",
]
