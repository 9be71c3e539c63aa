from __future__ import annotations

from qlocal.fit.models import FidelitySeries, FitModel, FitResult, SeriesSource
from qlocal.fit.regression import fit_leading_coefficient
from qlocal.fit.table import (
    TARGET_COEFFICIENTS,
    CoefficientTable,
    build_exact_series,
    coefficient_table,
    read_series,
    saturation_checks,
    series_from_ledger,
)

__all__ = [
    "FidelitySeries",
    "FitModel",
    "FitResult",
    "SeriesSource",
    "fit_leading_coefficient",
    "TARGET_COEFFICIENTS",
    "CoefficientTable",
    "build_exact_series",
    "coefficient_table",
    "read_series",
    "saturation_checks",
    "series_from_ledger",
]
