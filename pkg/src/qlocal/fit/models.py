from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from qlocal.evaluate.models import SeriesPoint


class SeriesSource(str, Enum):
    EXACT = "exact"
    SIMULATED = "simulated"


class FitModel(str, Enum):
    LEADING = "c"
    WITH_CORRECTION = "c,d"
    HALF_ORDER = "c,h,d"

    @classmethod
    def parse(cls, value: "str | FitModel") -> "FitModel":
        if isinstance(value, FitModel):
            return value
        normalized = str(value).replace(" ", "").lower()
        for member in cls:
            if member.value == normalized:
                return member
        raise ValueError(f"Unknown fit model {value!r}; expected c, c,d or c,h,d")

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(self.value.split(","))

    @property
    def parameter_count(self) -> int:
        return len(self.terms)


@dataclass(frozen=True, slots=True)
class FidelitySeries:
    """Fidelity against copy count for one scheme; stderr is 0 for exact points."""

    scheme: str
    points: tuple[SeriesPoint, ...]
    source: SeriesSource = SeriesSource.EXACT

    def __post_init__(self) -> None:
        points = tuple(self.points)
        copies = [point.copies for point in points]
        if any(b <= a for a, b in zip(copies, copies[1:])):
            raise ValueError(f"series {self.scheme!r} needs strictly increasing N")
        for point in points:
            if not 0.5 - 1e-12 <= point.fidelity <= 1.0:
                raise ValueError(f"series {self.scheme!r}: F={point.fidelity} at N={point.copies} lies outside [1/2, 1]")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "source", SeriesSource(self.source))

    @property
    def copies(self) -> tuple[int, ...]:
        return tuple(point.copies for point in self.points)

    def restricted(self, min_copies: int | None = None, max_copies: int | None = None) -> "FidelitySeries":
        kept = tuple(
            point
            for point in self.points
            if (min_copies is None or point.copies >= min_copies) and (max_copies is None or point.copies <= max_copies)
        )
        return FidelitySeries(self.scheme, kept, self.source)

    def to_dict(self) -> dict[str, Any]:
        return {"scheme": self.scheme, "source": self.source.value, "points": [point.to_dict() for point in self.points]}


@dataclass(frozen=True, slots=True)
class FitResult:
    scheme: str
    model: FitModel
    c: float
    c_stderr: float
    residual: float
    points_used: int
    min_copies: int
    max_copies: int
    d: float | None = None
    d_stderr: float | None = None
    h: float | None = None
    h_stderr: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "model": self.model.value,
            "c": self.c,
            "c_stderr": self.c_stderr,
            "d": self.d,
            "d_stderr": self.d_stderr,
            "h": self.h,
            "h_stderr": self.h_stderr,
            "residual": self.residual,
            "points_used": self.points_used,
            "N_min": self.min_copies,
            "N_max": self.max_copies,
            "notes": list(self.notes),
        }


__all__ = ["SeriesSource", "FitModel", "FidelitySeries", "FitResult"]
