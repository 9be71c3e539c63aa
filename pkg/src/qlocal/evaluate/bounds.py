from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np
from scipy.special import gammaln

from qlocal.core.bloch import Prior
from qlocal.evaluate.models import FidelityReport

BOUND_TOLERANCE = 1e-9


def _log_binomial(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def cm_bound_2d(N: int) -> float:
    """Best fidelity of any collective measurement on N equatorial copies."""
    if N < 1:
        raise ValueError("N must be >= 1")
    i = np.arange(N, dtype=float)
    log_terms = 0.5 * (_log_binomial(N, i) + _log_binomial(N, i + 1.0)) - (N + 1) * math.log(2.0)
    return 0.5 + float(np.sum(np.exp(log_terms)))


def cm_bound_3d(N: int) -> float:
    """Best fidelity of any collective measurement on N copies, (N+1)/(N+2)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return (N + 1) / (N + 2)


def cm_bound(prior: Prior, N: int) -> float:
    return cm_bound_3d(N) if prior is Prior.SPHERE_3D else cm_bound_2d(N)


@dataclass(frozen=True, slots=True)
class BoundRow:
    copies: int
    bound_2d: float
    bound_3d: float

    @property
    def ordered(self) -> bool:
        return self.bound_2d > self.bound_3d

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.copies,
            "cm_2d": self.bound_2d,
            "cm_3d": self.bound_3d,
            "scaled_2d": self.copies * (1.0 - self.bound_2d),
            "scaled_3d": self.copies * (1.0 - self.bound_3d),
            "ordered": self.ordered,
        }


@dataclass(frozen=True, slots=True)
class BoundOrderingReport:
    rows: tuple[BoundRow, ...]
    local_checks: tuple[dict[str, Any], ...] = field(default_factory=tuple)

    @property
    def ordering_holds(self) -> bool:
        return all(row.ordered for row in self.rows)

    @property
    def local_within_bounds(self) -> bool:
        return all(bool(check["within_bound"]) for check in self.local_checks)

    @property
    def passed(self) -> bool:
        return self.ordering_holds and self.local_within_bounds

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "ordering_holds": self.ordering_holds,
            "local_within_bounds": self.local_within_bounds,
            "rows": [row.to_dict() for row in self.rows],
            "local_checks": [dict(check) for check in self.local_checks],
        }


def verify_bound_ordering(N_max: int, local_reports: Iterable[FidelityReport] = ()) -> BoundOrderingReport:
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    rows = tuple(BoundRow(n, cm_bound_2d(n), cm_bound_3d(n)) for n in range(1, N_max + 1))
    checks = []
    for report in local_reports:
        bound = cm_bound(report.prior, report.copies)
        checks.append(
            {
                "strategy": report.strategy,
                "prior": report.prior.value,
                "N": report.copies,
                "fidelity": report.fidelity,
                "cm_bound": bound,
                "within_bound": report.fidelity <= bound + BOUND_TOLERANCE,
            }
        )
    return BoundOrderingReport(rows=rows, local_checks=tuple(checks))


@dataclass(frozen=True, slots=True)
class GapRow:
    copies: int
    local_fidelity: float
    cm_fidelity: float

    @property
    def gap(self) -> float:
        return self.cm_fidelity - self.local_fidelity

    @property
    def relative_gap(self) -> float:
        return self.gap / self.cm_fidelity

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.copies,
            "local": self.local_fidelity,
            "scaled_local": self.copies * (1.0 - self.local_fidelity),
            "cm": self.cm_fidelity,
            "scaled_cm": self.copies * (1.0 - self.cm_fidelity),
            "gap": self.gap,
            "relative_gap": self.relative_gap,
        }


def fidelity_gap_table(local: Mapping[int, float], prior: Prior = Prior.SPHERE_3D) -> tuple[GapRow, ...]:
    """Local fidelities next to the collective bound, sorted by N.

    How close N(1-F) of the local scheme sits to the bound's is left for the
    reader to judge; no threshold is applied here.
    """
    return tuple(GapRow(int(n), float(local[n]), cm_bound(prior, int(n))) for n in sorted(local))


__all__ = [
    "BOUND_TOLERANCE",
    "cm_bound_2d",
    "cm_bound_3d",
    "cm_bound",
    "BoundRow",
    "BoundOrderingReport",
    "verify_bound_ordering",
    "GapRow",
    "fidelity_gap_table",
]
