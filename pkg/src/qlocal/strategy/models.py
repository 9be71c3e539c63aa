from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from qlocal.core.bloch import ROUNDOFF_TOLERANCE, UNIT_TOLERANCE, BlochVector, Prior
from qlocal.errors import DimensionMismatchError, NonUnitVectorError, ParityError, PlanError

LAMBDA_RANGE = (0.0, 1.5)
FIRST_STAGE_AXES = 3


def _validate_bits(bits: str) -> None:
    if any(char not in "01" for char in bits):
        raise PlanError(f"Outcome strings may only contain 0 and 1, got {bits!r}")


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    if not np.all(np.isfinite(rows)):
        raise NonUnitVectorError("node directions must be finite")
    bad = np.flatnonzero(np.abs(norms - 1.0) > ROUNDOFF_TOLERANCE)
    if bad.size:
        raise NonUnitVectorError(f"node {int(bad[0])} has norm {norms[bad[0]]:.12g}, expected 1")
    return rows / norms[:, None]


@dataclass(frozen=True, slots=True)
class AdaptiveTree:
    """Full binary measurement tree of depth N.

    Only the outcome-0 direction m0(h) of each node is stored; outcome 1 uses
    -m0(h), so the von Neumann antipodal condition holds by construction.
    Rows are in level order: the node for history h (length k, newest
    outcome leftmost) sits at row 2**k - 1 + int(h, 2).
    """

    depth: int
    directions: np.ndarray

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise PlanError("tree depth must be >= 1")
        rows = np.array(self.directions, dtype=float)
        expected = (2**self.depth - 1, 3)
        if rows.shape != expected:
            raise PlanError(f"tree of depth {self.depth} needs directions of shape {expected}, got {rows.shape}")
        rows = _unit_rows(rows)
        rows.setflags(write=False)
        object.__setattr__(self, "directions", rows)

    @property
    def node_count(self) -> int:
        return 2**self.depth - 1

    @property
    def is_planar(self) -> bool:
        return bool(np.all(self.directions[:, 2] == 0.0))

    @staticmethod
    def node_index(history: str) -> int:
        _validate_bits(history)
        level = len(history)
        return (1 << level) - 1 + (int(history, 2) if level else 0)

    @staticmethod
    def histories(level: int) -> list[str]:
        if level == 0:
            return [""]
        return [format(index, f"0{level}b") for index in range(1 << level)]

    def direction(self, history: str) -> BlochVector:
        if len(history) >= self.depth:
            raise PlanError(f"history of length {len(history)} has no measurement in a depth-{self.depth} tree")
        row = self.directions[self.node_index(history)]
        return BlochVector.from_array(row)

    def level_directions(self, level: int) -> np.ndarray:
        start = (1 << level) - 1
        return self.directions[start : start + (1 << level)]

    def path_directions(self, outcome: str) -> np.ndarray:
        """Outcome-signed directions m(x_k), k = 1..N, for a full outcome string."""
        _validate_bits(outcome)
        if len(outcome) != self.depth:
            raise PlanError(f"outcome must have {self.depth} bits, got {len(outcome)}")
        rows = np.empty((self.depth, 3))
        for step in range(1, self.depth + 1):
            bit = outcome[self.depth - step]
            history = outcome[self.depth - step + 1 :]
            sign = -1.0 if bit == "1" else 1.0
            rows[step - 1] = sign * self.directions[self.node_index(history)]
        return rows

    def rotated(self, matrix: np.ndarray) -> "AdaptiveTree":
        return AdaptiveTree(self.depth, self.directions @ np.asarray(matrix, dtype=float).T)

    @classmethod
    def fixed(cls, directions: Sequence[BlochVector] | np.ndarray) -> "AdaptiveTree":
        rows = np.array([d.array if isinstance(d, BlochVector) else d for d in directions], dtype=float)
        depth = rows.shape[0]
        expanded = np.concatenate([np.repeat(rows[level : level + 1], 1 << level, axis=0) for level in range(depth)])
        return cls(depth, expanded)

    @classmethod
    def from_nodes(cls, depth: int, nodes: Mapping[str, BlochVector | Iterable[float]]) -> "AdaptiveTree":
        rows = np.full((2**depth - 1, 3), np.nan)
        for history, value in nodes.items():
            if len(history) >= depth:
                raise PlanError(f"prefix {history!r} is too long for depth {depth}")
            vector = value.array if isinstance(value, BlochVector) else np.asarray(list(value), dtype=float)
            if vector.shape == (2,):
                vector = np.array([vector[0], vector[1], 0.0])
            rows[cls.node_index(history)] = vector
        missing = np.flatnonzero(np.isnan(rows[:, 0]))
        if missing.size:
            raise PlanError(f"tree is missing {missing.size} node direction(s)")
        return cls(depth, rows)

    @classmethod
    def from_angles(cls, depth: int, theta: np.ndarray, phi: np.ndarray) -> "AdaptiveTree":
        return cls(depth, angles_to_directions(theta, phi))

    def to_dict(self) -> dict[str, Any]:
        nodes = []
        for level in range(self.depth):
            for history in self.histories(level):
                nodes.append({"prefix": history, "dir": [float(v) for v in self.directions[self.node_index(history)]]})
        return {"kind": "adaptive-tree", "depth": self.depth, "nodes": nodes}


def angles_to_directions(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sin_theta = np.sin(theta)
    return np.stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)], axis=-1)


@dataclass(frozen=True, slots=True)
class FrequencyRecord:
    counts: tuple[int, ...]
    repetitions: int

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise PlanError("repetitions must be >= 1")
        if not all(0 <= int(count) <= self.repetitions for count in self.counts):
            raise PlanError(f"plus-counts must lie in [0, {self.repetitions}], got {self.counts}")
        object.__setattr__(self, "counts", tuple(int(count) for count in self.counts))

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(count / self.repetitions for count in self.counts)

    @property
    def is_balanced(self) -> bool:
        return all(2 * count == self.repetitions for count in self.counts)

    def to_dict(self) -> dict[str, Any]:
        return {"counts": list(self.counts), "repetitions": self.repetitions, "alphas": list(self.alphas)}


@dataclass(frozen=True, slots=True)
class FixedAxesPlan:
    """Tomography-style plan: ``repetitions`` copies measured along each axis."""

    axes: tuple[BlochVector, ...]
    repetitions: int

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        if len(axes) not in (2, 3):
            raise PlanError("a fixed-axes plan needs 2 (2D) or 3 (3D) axes")
        if self.repetitions < 1:
            raise PlanError("repetitions must be >= 1")
        for i in range(len(axes)):
            for j in range(i + 1, len(axes)):
                if abs(axes[i].dot(axes[j])) > UNIT_TOLERANCE:
                    raise PlanError(f"axes {i} and {j} are not orthogonal")
        if len(axes) == 2 and not all(axis.is_planar for axis in axes):
            raise DimensionMismatchError("2D plans need axes in the x-y plane")
        object.__setattr__(self, "axes", axes)

    @property
    def prior(self) -> Prior:
        return Prior.SPHERE_3D if len(self.axes) == 3 else Prior.CIRCLE_2D

    @property
    def total_copies(self) -> int:
        return len(self.axes) * self.repetitions

    @property
    def axis_matrix(self) -> np.ndarray:
        return np.array([axis.array for axis in self.axes])

    @classmethod
    def standard(cls, prior: Prior, repetitions: int) -> "FixedAxesPlan":
        if prior is Prior.SPHERE_3D:
            axes = (BlochVector(1.0, 0.0, 0.0), BlochVector(0.0, 1.0, 0.0), BlochVector(0.0, 0.0, 1.0))
        else:
            axes = (BlochVector(1.0, 0.0, 0.0, dim=2), BlochVector(0.0, 1.0, 0.0, dim=2))
        return cls(axes, repetitions)

    @classmethod
    def from_total(cls, prior: Prior, total_copies: int) -> "FixedAxesPlan":
        count = prior.dimension
        if total_copies < count or total_copies % count:
            raise PlanError(f"{prior.value} fixed-axes plans need N divisible by {count}, got {total_copies}")
        return cls.standard(prior, total_copies // count)

    def axis_for_step(self, step: int) -> int:
        """Axis used by measurement ``step`` (1-based); copies are blocked per axis."""
        return (step - 1) // self.repetitions

    def to_tree(self) -> AdaptiveTree:
        return AdaptiveTree.fixed([self.axes[self.axis_for_step(step)] for step in range(1, self.total_copies + 1)])

    def frequencies_for_outcome(self, outcome: str) -> FrequencyRecord:
        _validate_bits(outcome)
        if len(outcome) != self.total_copies:
            raise PlanError(f"outcome must have {self.total_copies} bits")
        counts = [0] * len(self.axes)
        for step in range(1, self.total_copies + 1):
            if outcome[self.total_copies - step] == "0":
                counts[self.axis_for_step(step)] += 1
        return FrequencyRecord(tuple(counts), self.repetitions)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "fixed-axes",
            "depth": self.total_copies,
            "repetitions": self.repetitions,
            "axes": [axis.to_list() for axis in self.axes],
        }


@dataclass(frozen=True, slots=True)
class TwoStagePlan:
    """Rough fixed-axes estimate on N0 copies, then two axes orthogonal to it.

    The first stage spreads N0 over x, y and z as evenly as possible, with
    the surplus going to the earlier axes (N0 = 20 measures 7, 7 and 6).
    """

    total_copies: int
    first_stage_copies: int
    lam: float = 1.0
    beta: float | None = field(default=None)

    def __post_init__(self) -> None:
        if not 0 < self.first_stage_copies < self.total_copies:
            raise PlanError("two-stage plans need 0 < N0 < N")
        if self.first_stage_copies < FIRST_STAGE_AXES:
            raise PlanError(f"the first stage needs at least one copy per axis; N0={self.first_stage_copies}")
        if (self.total_copies - self.first_stage_copies) % 2:
            raise ParityError(
                f"N - N0 = {self.total_copies - self.first_stage_copies} must be even to split between two axes"
            )
        low, high = LAMBDA_RANGE
        if not low <= self.lam <= high:
            raise PlanError(f"lambda must lie in [{low}, {high}], got {self.lam}")

    @classmethod
    def from_beta(cls, total_copies: int, beta: float = 0.5, lam: float = 1.0) -> "TwoStagePlan":
        """N0 = round(N**beta), moved to the nearest admissible size when N - N0 is odd (ties to the smaller)."""
        if not 0.0 < beta < 1.0:
            raise PlanError("beta must lie in (0, 1)")
        target = round(total_copies**beta)
        candidates = [
            n0 for n0 in range(FIRST_STAGE_AXES, total_copies) if (total_copies - n0) % 2 == 0
        ]
        if not candidates:
            raise PlanError(f"no admissible first-stage size for N={total_copies}")
        first = min(candidates, key=lambda n0: (abs(n0 - target), n0))
        return cls(total_copies, first, lam=lam, beta=beta)

    @property
    def first_stage_repetitions(self) -> tuple[int, ...]:
        base, surplus = divmod(self.first_stage_copies, FIRST_STAGE_AXES)
        return tuple(base + int(axis < surplus) for axis in range(FIRST_STAGE_AXES))

    @property
    def second_stage_repetitions(self) -> int:
        return (self.total_copies - self.first_stage_copies) // 2

    @property
    def effective_beta(self) -> float:
        return math.log(self.first_stage_copies) / math.log(self.total_copies)

    def with_lambda(self, lam: float) -> "TwoStagePlan":
        return TwoStagePlan(self.total_copies, self.first_stage_copies, lam=lam, beta=self.beta)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "two-stage",
            "depth": self.total_copies,
            "n0": self.first_stage_copies,
            "lambda": self.lam,
            "beta": self.beta,
        }


Strategy = AdaptiveTree | FixedAxesPlan | TwoStagePlan


def tree_direction(tree: AdaptiveTree, history: str) -> BlochVector:
    """Outcome-0 direction measured after ``history``; outcome 1 uses its antipode."""
    return tree.direction(history)


__all__ = [
    "LAMBDA_RANGE",
    "FIRST_STAGE_AXES",
    "tree_direction",
    "AdaptiveTree",
    "FrequencyRecord",
    "FixedAxesPlan",
    "TwoStagePlan",
    "Strategy",
    "angles_to_directions",
]
