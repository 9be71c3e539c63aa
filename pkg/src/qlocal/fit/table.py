from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from qlocal.errors import MissingSeriesError
from qlocal.evaluate.models import EvaluationCaps, SeriesPoint
from qlocal.evaluate.series import default_copies, exact_series, parse_scheme
from qlocal.fit.models import FidelitySeries, FitModel, FitResult, SeriesSource
from qlocal.fit.regression import DEFAULT_MIN_COPIES, fit_leading_coefficient
from qlocal.simulate.ledger import LedgerRow, read_ledger
from qlocal.utils.io import read_csv

# Leading coefficients c in 1 - F ~ c/N.
TARGET_COEFFICIENTS: dict[str, float] = {
    "2d-cm": 1.0 / 4.0,
    "2d-og": 1.0 / 4.0,
    "2d-t": 3.0 / 8.0,
    "3d-cm": 1.0,
    "3d-t": 6.0 / 5.0,
    "3d-og": 13.0 / 12.0,
    "two-stage": 1.0,
}
# The 2D optimal-guess series carries an N^(-3/2) correction that c/N + d/N^2 cannot absorb.
DEFAULT_MODELS: dict[str, FitModel] = {"2d-og": FitModel.HALF_ORDER}
SATURATION_TOLERANCE = 0.05
SEPARATION_SIGMAS = 3.0


def default_model(scheme: str) -> FitModel:
    return DEFAULT_MODELS.get(scheme, FitModel.WITH_CORRECTION)


def build_exact_series(
    scheme: str, copies: Iterable[int] | None = None, caps: EvaluationCaps | None = None
) -> FidelitySeries:
    """Exact series of ``scheme``; without ``copies`` the scheme's default grid is used."""
    name = parse_scheme(scheme)
    values = default_copies(name, caps) if copies is None else copies
    return FidelitySeries(name, tuple(exact_series(name, values, caps=caps)), SeriesSource.EXACT)


def series_from_ledger(rows: Sequence[LedgerRow], scheme: str) -> FidelitySeries:
    """Inverse-variance combination of every ledger run of ``scheme``, one point per N."""
    grouped: dict[int, list[LedgerRow]] = {}
    for row in rows:
        if row.scheme == scheme:
            grouped.setdefault(row.copies, []).append(row)
    if not grouped:
        raise MissingSeriesError(f"ledger holds no runs of scheme {scheme!r}")
    points = []
    for copies in sorted(grouped):
        runs = grouped[copies]
        if any(run.stderr <= 0.0 for run in runs):
            mean = sum(run.mean * run.trials for run in runs) / sum(run.trials for run in runs)
            points.append(SeriesPoint(copies, mean, 0.0))
            continue
        weights = [1.0 / run.stderr**2 for run in runs]
        total = sum(weights)
        mean = sum(w * run.mean for w, run in zip(weights, runs)) / total
        points.append(SeriesPoint(copies, mean, 1.0 / math.sqrt(total)))
    return FidelitySeries(scheme, tuple(points), SeriesSource.SIMULATED)


def read_series(path: Path, scheme: str | None = None) -> list[FidelitySeries]:
    """Load a ledger CSV (every scheme, or ``scheme``) or a series CSV written by ``series``."""
    raw = read_csv(path)
    header = set(raw[0]) if raw else set()
    if "strategy_hash" in header:
        rows = read_ledger(path)
        schemes = [scheme] if scheme else sorted({row.scheme for row in rows})
        return [series_from_ledger(rows, name) for name in schemes]
    if not raw:
        raise MissingSeriesError(f"{path} holds no series points")
    if scheme is None:
        scheme = path.stem
    try:
        points = tuple(
            SeriesPoint(int(row["N"]), float(row["fidelity"]), float(row.get("stderr") or 0.0)) for row in raw
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed series CSV: {exc}") from exc
    source = SeriesSource.SIMULATED if any(point.stderr > 0.0 for point in points) else SeriesSource.EXACT
    return [FidelitySeries(scheme, points, source)]


@dataclass(frozen=True, slots=True)
class CoefficientRow:
    fit: FitResult
    target: float

    @property
    def deviation(self) -> float:
        return (self.fit.c - self.target) / self.target

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheme": self.fit.scheme,
            "model": self.fit.model.value,
            "fitted_c": self.fit.c,
            "c_stderr": self.fit.c_stderr,
            "target_c": self.target,
            "relative_deviation": self.deviation,
            "h": self.fit.h,
            "d": self.fit.d,
            "N_min": self.fit.min_copies,
            "N_max": self.fit.max_copies,
            "points": self.fit.points_used,
        }


@dataclass(frozen=True, slots=True)
class SaturationCheck:
    name: str
    passed: bool | None
    detail: str

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True, slots=True)
class CoefficientTable:
    rows: tuple[CoefficientRow, ...]
    model: FitModel | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def row(self, scheme: str) -> CoefficientRow:
        for row in self.rows:
            if row.fit.scheme == scheme:
                return row
        raise MissingSeriesError(f"coefficient table has no row for {scheme!r}")

    def has(self, scheme: str) -> bool:
        return any(row.fit.scheme == scheme for row in self.rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.value if self.model is not None else "auto",
            "rows": [row.to_dict() for row in self.rows],
            "checks": [check.to_dict() for check in saturation_checks(self)],
            "notes": list(self.notes),
        }


def coefficient_table(
    series: Mapping[str, FidelitySeries],
    schemes: Sequence[str] | None = None,
    model: FitModel | str | None = None,
    min_copies: int | None = DEFAULT_MIN_COPIES,
) -> CoefficientTable:
    """Fit every requested scheme and set it next to its analytic coefficient.

    Without ``model`` each scheme is fitted with :func:`default_model`.
    """
    chosen = FitModel.parse(model) if model is not None else None
    wanted = list(schemes) if schemes is not None else [name for name in TARGET_COEFFICIENTS if name in series]
    missing = [name for name in wanted if name not in series]
    if missing:
        raise MissingSeriesError(f"no series loaded for scheme(s): {', '.join(missing)}")
    if not wanted:
        raise MissingSeriesError("no series with a known target coefficient was supplied")
    rows = []
    notes = []
    for name in wanted:
        if name not in TARGET_COEFFICIENTS:
            notes.append(f"scheme {name!r} has no analytic coefficient; skipped")
            continue
        fit = fit_leading_coefficient(series[name], chosen or default_model(name), min_copies)
        rows.append(CoefficientRow(fit, TARGET_COEFFICIENTS[name]))
    return CoefficientTable(rows=tuple(rows), model=chosen, notes=tuple(notes))


def saturation_checks(table: CoefficientTable) -> list[SaturationCheck]:
    checks = []
    if table.has("2d-og") and table.has("2d-cm"):
        og, cm = table.row("2d-og").fit, table.row("2d-cm").fit
        gap = abs(og.c - cm.c) / cm.c
        checks.append(
            SaturationCheck("2d-og saturates 2d-cm", gap <= SATURATION_TOLERANCE, f"relative gap {gap:.4f} (limit {SATURATION_TOLERANCE})")
        )
    else:
        checks.append(SaturationCheck("2d-og saturates 2d-cm", None, "needs 2d-og and 2d-cm"))

    if table.has("3d-og"):
        og = table.row("3d-og").fit
        cm_error = table.row("3d-cm").fit.c_stderr if table.has("3d-cm") else 0.0
        sigma = math.hypot(og.c_stderr, cm_error)
        distance = abs(og.c - 1.0)
        passed = distance > SEPARATION_SIGMAS * sigma
        checks.append(
            SaturationCheck("3d-og does not saturate", passed, f"|c - 1| = {distance:.4f}, {SEPARATION_SIGMAS:g} sigma = {SEPARATION_SIGMAS * sigma:.4f}")
        )
    else:
        checks.append(SaturationCheck("3d-og does not saturate", None, "needs 3d-og"))

    if table.has("3d-t") and table.has("3d-og"):
        t, og = table.row("3d-t").fit.c, table.row("3d-og").fit.c
        checks.append(SaturationCheck("3d-t above 3d-og", t > og, f"c_T = {t:.4f}, c_OG = {og:.4f}"))
    else:
        checks.append(SaturationCheck("3d-t above 3d-og", None, "needs 3d-t and 3d-og"))
    return checks


__all__ = [
    "TARGET_COEFFICIENTS",
    "DEFAULT_MODELS",
    "default_model",
    "build_exact_series",
    "series_from_ledger",
    "read_series",
    "CoefficientRow",
    "SaturationCheck",
    "CoefficientTable",
    "coefficient_table",
    "saturation_checks",
]
