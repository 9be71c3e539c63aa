from __future__ import annotations

import os
import tempfile
import unittest
from pathlib import Path

from qlocal.core.bloch import Prior
from qlocal.errors import MissingSeriesError
from qlocal.evaluate.formatters import SERIES_FIELDS, series_rows
from qlocal.evaluate.models import SeriesPoint
from qlocal.fit.models import FidelitySeries, FitModel, SeriesSource
from qlocal.fit.regression import fit_leading_coefficient
from qlocal.fit.table import (
    build_exact_series,
    coefficient_table,
    default_model,
    read_series,
    saturation_checks,
    series_from_ledger,
)
from qlocal.simulate.ledger import LedgerRow
from qlocal.utils.io import write_csv

SLOW = bool(os.environ.get("QLOCAL_SLOW_TESTS"))
COPIES = list(range(40, 201, 10))


def synthetic(scheme: str, c: float, d: float = 0.0, stderr: float = 0.0, h: float = 0.0) -> FidelitySeries:
    points = tuple(SeriesPoint(n, 1.0 - c / n - h / n**1.5 - d / n**2, stderr) for n in COPIES)
    source = SeriesSource.SIMULATED if stderr else SeriesSource.EXACT
    return FidelitySeries(scheme, points, source)


def ledger_row(copies: int, mean: float, stderr: float, seed: int = 0) -> LedgerRow:
    return LedgerRow("abc", "two-stage", Prior.SPHERE_3D, copies, 1000, seed, mean, stderr)


class TestRegression(unittest.TestCase):
    def test_recovers_both_coefficients(self) -> None:
        fit = fit_leading_coefficient(synthetic("3d-og", 1.25, 0.5))
        self.assertAlmostEqual(fit.c, 1.25, places=9)
        self.assertAlmostEqual(fit.d, 0.5, places=6)
        self.assertLess(fit.c_stderr, 1e-9)
        self.assertEqual((fit.min_copies, fit.max_copies, fit.points_used), (40, 200, len(COPIES)))

    def test_leading_model(self) -> None:
        fit = fit_leading_coefficient(synthetic("2d-t", 0.375), model="c")
        self.assertAlmostEqual(fit.c, 0.375, places=10)
        self.assertIsNone(fit.d)

    def test_range_restriction(self) -> None:
        fit = fit_leading_coefficient(synthetic("3d-t", 1.2), min_copies=100, max_copies=150)
        self.assertEqual((fit.min_copies, fit.max_copies, fit.points_used), (100, 150, 6))

    def test_needs_four_points(self) -> None:
        with self.assertRaises(ValueError):
            fit_leading_coefficient(synthetic("3d-t", 1.2), min_copies=180)

    def test_rejects_perfect_fidelity(self) -> None:
        points = tuple(SeriesPoint(n, 1.0) for n in COPIES)
        with self.assertRaises(ValueError):
            fit_leading_coefficient(FidelitySeries("flat", points))

    def test_rejects_mixed_errors(self) -> None:
        points = list(synthetic("mix", 1.0, stderr=1e-5).points)
        points[0] = SeriesPoint(points[0].copies, points[0].fidelity, 0.0)
        with self.assertRaises(ValueError):
            fit_leading_coefficient(FidelitySeries("mix", tuple(points), SeriesSource.SIMULATED))

    def test_common_error_scale_drops_out(self) -> None:
        noisy = [SeriesPoint(p.copies, p.fidelity + (1e-6 if i % 2 else -1e-6), 1e-5) for i, p in enumerate(synthetic("s", 1.0).points)]
        wider = [SeriesPoint(p.copies, p.fidelity, 2e-5) for p in noisy]
        first = fit_leading_coefficient(FidelitySeries("s", tuple(noisy), SeriesSource.SIMULATED))
        second = fit_leading_coefficient(FidelitySeries("s", tuple(wider), SeriesSource.SIMULATED))
        self.assertAlmostEqual(first.c, second.c, places=12)
        self.assertAlmostEqual(first.c_stderr / second.c_stderr, 1.0, places=9)

    def test_half_order_term(self) -> None:
        series = synthetic("2d-og", 0.25, 0.3, h=-0.5)
        full = fit_leading_coefficient(series, model="c,h,d")
        self.assertAlmostEqual(full.c, 0.25, places=7)
        self.assertAlmostEqual(full.h, -0.5, places=5)
        self.assertEqual(full.to_dict()["model"], "c,h,d")
        truncated = fit_leading_coefficient(series, model="c,d")
        self.assertIsNone(truncated.h)
        self.assertGreater(abs(truncated.c - 0.25), 0.01)

    def test_model_parsing(self) -> None:
        self.assertIs(FitModel.parse("c, d"), FitModel.WITH_CORRECTION)
        self.assertIs(FitModel.parse("c,h,d"), FitModel.HALF_ORDER)
        self.assertEqual(FitModel.HALF_ORDER.parameter_count, 3)
        with self.assertRaises(ValueError):
            FitModel.parse("c,d,e")


class TestSeries(unittest.TestCase):
    def test_series_validation(self) -> None:
        with self.assertRaises(ValueError):
            FidelitySeries("bad", (SeriesPoint(10, 0.9), SeriesPoint(5, 0.8)))
        with self.assertRaises(ValueError):
            FidelitySeries("bad", (SeriesPoint(10, 0.2),))

    def test_ledger_runs_are_combined_per_n(self) -> None:
        rows = [ledger_row(64, 0.98, 0.002, 1), ledger_row(64, 0.99, 0.001, 2), ledger_row(100, 0.99, 0.001)]
        series = series_from_ledger(rows, "two-stage")
        self.assertEqual(series.copies, (64, 100))
        first = series.points[0]
        self.assertAlmostEqual(first.fidelity, (0.98 * 250_000 + 0.99 * 1_000_000) / 1_250_000)
        self.assertAlmostEqual(first.stderr, 1.0 / 1_250_000**0.5)
        self.assertIs(series.source, SeriesSource.SIMULATED)

    def test_missing_scheme(self) -> None:
        with self.assertRaises(MissingSeriesError):
            series_from_ledger([ledger_row(64, 0.98, 0.002)], "3d-og")

    def test_read_series_csv(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = write_csv(series_rows(synthetic("3d-cm", 1.0).points), SERIES_FIELDS, Path(tmp) / "3d-cm.csv")
            (series,) = read_series(path)
            self.assertEqual(series.scheme, "3d-cm")
            self.assertEqual(series.copies, tuple(COPIES))
            self.assertIs(series.source, SeriesSource.EXACT)


class TestCoefficientTable(unittest.TestCase):
    def test_collective_bound_has_unit_coefficient(self) -> None:
        series = build_exact_series("3d-cm", range(40, 181))
        table = coefficient_table({"3d-cm": series})
        self.assertAlmostEqual(table.row("3d-cm").fit.c, 1.0, delta=0.01)

    def test_saturation_checks_on_synthetic_series(self) -> None:
        series = {
            "2d-cm": synthetic("2d-cm", 0.25, 0.1),
            "2d-og": synthetic("2d-og", 0.25, 0.3),
            "3d-og": synthetic("3d-og", 13.0 / 12.0, 0.4, stderr=1e-6),
            "3d-t": synthetic("3d-t", 1.2, 0.2),
        }
        table = coefficient_table(series)
        self.assertEqual([row.fit.scheme for row in table.rows], ["2d-cm", "2d-og", "3d-t", "3d-og"])
        checks = {check.name: check.passed for check in saturation_checks(table)}
        self.assertEqual(
            checks,
            {"2d-og saturates 2d-cm": True, "3d-og does not saturate": True, "3d-t above 3d-og": True},
        )
        self.assertAlmostEqual(table.row("2d-og").deviation, 0.0, places=6)

    def test_default_models(self) -> None:
        self.assertIs(default_model("2d-og"), FitModel.HALF_ORDER)
        for scheme in ("2d-cm", "2d-t", "3d-og", "two-stage"):
            self.assertIs(default_model(scheme), FitModel.WITH_CORRECTION)
        series = {"2d-og": synthetic("2d-og", 0.25, 0.3, h=-0.5), "2d-cm": synthetic("2d-cm", 0.25, 0.1)}
        auto = coefficient_table(series)
        self.assertEqual(auto.to_dict()["model"], "auto")
        self.assertIs(auto.row("2d-og").fit.model, FitModel.HALF_ORDER)
        self.assertIs(auto.row("2d-cm").fit.model, FitModel.WITH_CORRECTION)
        self.assertAlmostEqual(auto.row("2d-og").fit.c, 0.25, places=7)
        forced = coefficient_table(series, model="c,d")
        self.assertIs(forced.row("2d-og").fit.model, FitModel.WITH_CORRECTION)
        checks = {check.name: check.passed for check in saturation_checks(forced)}
        self.assertFalse(checks["2d-og saturates 2d-cm"])

    def test_missing_series_are_reported(self) -> None:
        with self.assertRaises(MissingSeriesError):
            coefficient_table({"3d-cm": synthetic("3d-cm", 1.0)}, schemes=["3d-og"])
        table = coefficient_table({"3d-cm": synthetic("3d-cm", 1.0)})
        skipped = [check.name for check in saturation_checks(table) if check.passed is None]
        self.assertEqual(len(skipped), 3)

    @unittest.skipUnless(SLOW, "set QLOCAL_SLOW_TESTS=1 to fit the exact fixed-axes series")
    def test_exact_fixed_axes_coefficients(self) -> None:
        copies = range(42, 181, 6)
        series = {name: build_exact_series(name, copies) for name in ("2d-cm", "2d-og", "2d-t", "3d-og", "3d-t")}
        table = coefficient_table(series)
        self.assertAlmostEqual(table.row("3d-og").fit.c, 13.0 / 12.0, delta=0.05)
        self.assertAlmostEqual(table.row("3d-t").fit.c, 1.2, delta=0.05)
        self.assertAlmostEqual(table.row("2d-t").fit.c, 0.375, delta=0.02)
        self.assertGreater(table.row("3d-t").fit.c, table.row("3d-og").fit.c)
        checks = {check.name: check.passed for check in saturation_checks(table)}
        self.assertTrue(checks["3d-og does not saturate"])
        self.assertTrue(checks["3d-t above 3d-og"])

    @unittest.skipUnless(SLOW, "set QLOCAL_SLOW_TESTS=1 to fit the exact 2D series on their default grids")
    def test_two_dimensional_optimal_guess_saturates(self) -> None:
        series = {name: build_exact_series(name) for name in ("2d-cm", "2d-og")}
        self.assertEqual(series["2d-og"].copies[-1], 800)
        table = coefficient_table(series)
        self.assertIs(table.row("2d-og").fit.model, FitModel.HALF_ORDER)
        self.assertAlmostEqual(table.row("2d-og").fit.c, 0.25, delta=0.0125)
        self.assertAlmostEqual(table.row("2d-cm").fit.c, 0.25, delta=0.0125)
        checks = {check.name: check.passed for check in saturation_checks(table)}
        self.assertTrue(checks["2d-og saturates 2d-cm"])


if __name__ == "__main__":
    unittest.main()
