from __future__ import annotations

from typing import Iterable

from qlocal.core.bloch import Prior
from qlocal.errors import PlanError, UsageError
from qlocal.evaluate.bounds import cm_bound
from qlocal.evaluate.fixed_axes import eval_fixed_axes
from qlocal.evaluate.models import EvaluationCaps, SeriesPoint
from qlocal.strategy.guesses import GuessKind
from qlocal.strategy.models import FixedAxesPlan

# scheme -> (prior, guess rule or None for the collective bound)
EXACT_SCHEMES: dict[str, tuple[Prior, GuessKind | None]] = {
    "2d-cm": (Prior.CIRCLE_2D, None),
    "3d-cm": (Prior.SPHERE_3D, None),
    "2d-t": (Prior.CIRCLE_2D, GuessKind.TOMOGRAPHIC),
    "2d-og": (Prior.CIRCLE_2D, GuessKind.OPTIMAL),
    "3d-t": (Prior.SPHERE_3D, GuessKind.TOMOGRAPHIC),
    "3d-og": (Prior.SPHERE_3D, GuessKind.OPTIMAL),
}


def parse_scheme(value: str) -> str:
    normalized = value.strip().lower()
    if normalized not in EXACT_SCHEMES:
        raise UsageError(f"unknown exact scheme {value!r}; expected one of {', '.join(EXACT_SCHEMES)}")
    return normalized


def admissible_copies(scheme: str, copies: Iterable[int]) -> list[int]:
    """Copy counts the scheme can realize; fixed-axes schemes need N divisible by the axis count."""
    prior, rule = EXACT_SCHEMES[parse_scheme(scheme)]
    if rule is None:
        return [n for n in copies if n >= 1]
    return [n for n in copies if n >= prior.dimension and n % prior.dimension == 0]


def default_copies(scheme: str, caps: EvaluationCaps | None = None) -> list[int]:
    """Default N grid of a scheme, kept inside the fixed-axes repetition cap of its prior.

    3D runs every multiple of 3 from 42 to 180; 2D runs 40 to 800 in steps of 20.
    Collective bounds share the grid of their prior.
    """
    prior, _ = EXACT_SCHEMES[parse_scheme(scheme)]
    limit = prior.dimension * (caps or EvaluationCaps()).repetitions_cap(prior)
    if prior is Prior.SPHERE_3D:
        top = min(180, limit)
        return list(range(min(42, top), top + 1, 3))
    top = min(800, limit)
    return list(range(min(40, top), top + 1, 20))


def scheme_fidelity(scheme: str, copies: int, caps: EvaluationCaps | None = None) -> float:
    prior, rule = EXACT_SCHEMES[parse_scheme(scheme)]
    if rule is None:
        return cm_bound(prior, copies)
    plan = FixedAxesPlan.from_total(prior, copies)
    return eval_fixed_axes(plan, rule, prior, caps=caps, include_outcomes=False).fidelity


def exact_series(scheme: str, copies: Iterable[int], caps: EvaluationCaps | None = None) -> list[SeriesPoint]:
    wanted = sorted(set(copies))
    usable = admissible_copies(scheme, wanted)
    if not usable:
        raise PlanError(f"no copy count in the requested range suits scheme {scheme!r}")
    return [SeriesPoint(n, scheme_fidelity(scheme, n, caps)) for n in usable]


__all__ = ["EXACT_SCHEMES", "parse_scheme", "admissible_copies", "default_copies", "scheme_fidelity", "exact_series"]
