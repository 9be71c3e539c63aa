from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from qlocal.core.bloch import UNIT_TOLERANCE, BlochVector, Prior, normalize
from qlocal.errors import PlanError
from qlocal.moments.polynomial import PosteriorVector
from qlocal.strategy.models import FixedAxesPlan, FrequencyRecord

_TRIAD_TOLERANCE = 1e-9


class GuessKind(str, Enum):
    OPTIMAL = "optimal"
    TOMOGRAPHIC = "tomographic"
    CONSTANT = "constant"

    @classmethod
    def parse(cls, value: "str | GuessKind") -> "GuessKind":
        if isinstance(value, GuessKind):
            return value
        normalized = str(value).strip().lower()
        aliases = {"og": cls.OPTIMAL, "optimal": cls.OPTIMAL, "t": cls.TOMOGRAPHIC, "tomographic": cls.TOMOGRAPHIC}
        if normalized in aliases:
            return aliases[normalized]
        if normalized == "constant":
            return cls.CONSTANT
        raise ValueError(f"Unknown guess rule {value!r}; expected optimal or tomographic")


def default_tiebreak(prior: Prior) -> BlochVector:
    if prior is Prior.CIRCLE_2D:
        return BlochVector(1.0, 0.0, 0.0, dim=2)
    return BlochVector(0.0, 0.0, 1.0)


def optimal_guess(posterior: PosteriorVector, tiebreak: BlochVector) -> BlochVector:
    """V/|V|; any unit vector is optimal when V vanishes, so fall back to ``tiebreak``."""
    if posterior.magnitude > UNIT_TOLERANCE:
        return normalize(posterior.array, dim=tiebreak.dim)
    return tiebreak


def tomographic_guess(freqs: FrequencyRecord, axes: Sequence[BlochVector] | None = None) -> BlochVector:
    """Normalized vector of frequency differences 2*alpha_i - 1 along the plan axes.

    When every alpha is exactly 1/2 the first axis is returned; use
    :func:`is_tomographic_tie` to flag that case.
    """
    resolved = tuple(axes) if axes is not None else FixedAxesPlan.standard(_prior_for(freqs), freqs.repetitions).axes
    if len(resolved) != len(freqs.counts):
        raise PlanError(f"{len(freqs.counts)} frequencies cannot be combined with {len(resolved)} axes")
    if freqs.is_balanced:
        return resolved[0]
    differences = np.array([2.0 * alpha - 1.0 for alpha in freqs.alphas])
    matrix = np.array([axis.array for axis in resolved])
    return normalize(differences @ matrix, dim=resolved[0].dim)


def is_tomographic_tie(freqs: FrequencyRecord) -> bool:
    return freqs.is_balanced


def two_stage_guess(
    M0: BlochVector,
    u: BlochVector,
    v: BlochVector,
    alpha_u: float,
    alpha_v: float,
    lam: float,
) -> BlochVector:
    """Rotate the first-stage guess towards the second-stage frequencies.

    omega = lam * sqrt((2 alpha_u - 1)^2 + (2 alpha_v - 1)^2) and
    tau = atan2(2 alpha_v - 1, 2 alpha_u - 1), with tau = 0 when both vanish.
    """
    _check_triad(M0.array, u.array, v.array)
    r_u = 2.0 * alpha_u - 1.0
    r_v = 2.0 * alpha_v - 1.0
    omega = lam * math.hypot(r_u, r_v)
    tau = math.atan2(r_v, r_u)
    result = M0.array * math.cos(omega) + (u.array * math.cos(tau) + v.array * math.sin(tau)) * math.sin(omega)
    return normalize(result)


def two_stage_guess_array(
    M0: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    alpha_u: np.ndarray,
    alpha_v: np.ndarray,
    lam: float,
) -> np.ndarray:
    """Row-wise :func:`two_stage_guess` for stacks of triads (shape (T, 3))."""
    r_u = 2.0 * np.asarray(alpha_u, dtype=float) - 1.0
    r_v = 2.0 * np.asarray(alpha_v, dtype=float) - 1.0
    omega = lam * np.hypot(r_u, r_v)
    tau = np.arctan2(r_v, r_u)
    in_plane = u * np.cos(tau)[:, None] + v * np.sin(tau)[:, None]
    return M0 * np.cos(omega)[:, None] + in_plane * np.sin(omega)[:, None]


def orthonormal_completion(M0: BlochVector) -> tuple[BlochVector, BlochVector]:
    """Return (u, v) with (M0, u, v) a right-handed orthonormal triad.

    u comes from the coordinate axis least aligned with M0 (lowest index on
    ties), so the choice is deterministic and never degenerate.
    """
    u, v = orthonormal_completion_array(M0.array[None, :])
    return BlochVector.from_array(u[0]), BlochVector.from_array(v[0])


def orthonormal_completion_array(M0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    count = M0.shape[0]
    axis = np.argmin(np.abs(M0), axis=1)
    seed = np.zeros_like(M0)
    seed[np.arange(count), axis] = 1.0
    u = seed - np.sum(seed * M0, axis=1)[:, None] * M0
    u /= np.linalg.norm(u, axis=1)[:, None]
    v = np.cross(M0, u)
    return u, v


def _check_triad(M0: np.ndarray, u: np.ndarray, v: np.ndarray) -> None:
    frame = np.stack([M0, u, v])
    if not np.allclose(frame @ frame.T, np.eye(3), atol=_TRIAD_TOLERANCE):
        raise ValueError("two-stage guess needs an orthonormal triad {M0, u, v}")
    if np.linalg.det(frame) <= 0.0:
        raise ValueError("two-stage guess needs a right-handed triad {M0, u, v}")


def _prior_for(freqs: FrequencyRecord) -> Prior:
    return Prior.SPHERE_3D if len(freqs.counts) == 3 else Prior.CIRCLE_2D


@runtime_checkable
class GuessRule(Protocol):
    kind: GuessKind

    def guess(self, outcome: str, posterior: PosteriorVector) -> BlochVector:
        ...


@dataclass(frozen=True, slots=True)
class OptimalGuess:
    tiebreak: BlochVector
    kind: GuessKind = GuessKind.OPTIMAL

    @classmethod
    def for_prior(cls, prior: Prior) -> "OptimalGuess":
        return cls(default_tiebreak(prior))

    def guess(self, outcome: str, posterior: PosteriorVector) -> BlochVector:
        return optimal_guess(posterior, self.tiebreak)


@dataclass(frozen=True, slots=True)
class TomographicGuess:
    plan: FixedAxesPlan
    kind: GuessKind = GuessKind.TOMOGRAPHIC

    def guess(self, outcome: str, posterior: PosteriorVector) -> BlochVector:
        return tomographic_guess(self.plan.frequencies_for_outcome(outcome), self.plan.axes)

    def is_tie(self, outcome: str) -> bool:
        return self.plan.frequencies_for_outcome(outcome).is_balanced


@dataclass(frozen=True, slots=True)
class ConstantGuess:
    vector: BlochVector
    kind: GuessKind = GuessKind.CONSTANT

    def guess(self, outcome: str, posterior: PosteriorVector) -> BlochVector:
        return self.vector


__all__ = [
    "GuessKind",
    "GuessRule",
    "OptimalGuess",
    "TomographicGuess",
    "ConstantGuess",
    "default_tiebreak",
    "optimal_guess",
    "tomographic_guess",
    "is_tomographic_tie",
    "two_stage_guess",
    "two_stage_guess_array",
    "orthonormal_completion",
    "orthonormal_completion_array",
]
