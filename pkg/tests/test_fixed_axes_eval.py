from __future__ import annotations

import math
import unittest

import numpy as np

from qlocal.core.bloch import Prior
from qlocal.errors import CapExceededError, DimensionMismatchError, PlanError, UsageError
from qlocal.evaluate.fixed_axes import eval_fixed_axes, fixed_axes_posteriors
from qlocal.evaluate.models import EvaluationCaps
from qlocal.evaluate.series import admissible_copies, default_copies, exact_series, parse_scheme, scheme_fidelity
from qlocal.evaluate.tree import eval_adaptive_tree, leaf_table
from qlocal.strategy.guesses import GuessKind, TomographicGuess
from qlocal.strategy.models import FixedAxesPlan


def aggregate_leaves(plan: FixedAxesPlan) -> tuple[np.ndarray, np.ndarray]:
    """Bit-string tables summed into frequency tuples."""
    table = leaf_table(plan.to_tree(), plan.prior)
    shape = (plan.repetitions + 1,) * len(plan.axes)
    probabilities = np.zeros(shape)
    posteriors = np.zeros(shape + (3,))
    for index in range(1 << plan.total_copies):
        counts = plan.frequencies_for_outcome(table.outcome(index)).counts
        probabilities[counts] += table.probabilities[index]
        posteriors[counts] += table.posteriors[index]
    return probabilities, posteriors


class TestBitStringEquivalence(unittest.TestCase):
    def test_tables_match_bit_string_sums(self) -> None:
        cases = [(Prior.SPHERE_3D, reps) for reps in (1, 2, 3)] + [(Prior.CIRCLE_2D, reps) for reps in (1, 3, 5)]
        for prior, reps in cases:
            with self.subTest(prior=prior.value, repetitions=reps):
                plan = FixedAxesPlan.standard(prior, reps)
                tables = fixed_axes_posteriors(plan)
                probabilities, posteriors = aggregate_leaves(plan)
                np.testing.assert_allclose(tables.probabilities, probabilities, atol=1e-12)
                np.testing.assert_allclose(tables.posteriors, posteriors, atol=1e-12)

    def test_fidelities_match_tree_evaluator(self) -> None:
        cases = [(Prior.SPHERE_3D, reps) for reps in (1, 2, 3)] + [(Prior.CIRCLE_2D, reps) for reps in (1, 2, 4, 5)]
        for prior, reps in cases:
            plan = FixedAxesPlan.standard(prior, reps)
            tree = plan.to_tree()
            with self.subTest(prior=prior.value, repetitions=reps, guess="optimal"):
                aggregated = eval_fixed_axes(plan, GuessKind.OPTIMAL, include_outcomes=False).fidelity
                bit_strings = eval_adaptive_tree(tree, prior, include_outcomes=False).fidelity
                self.assertAlmostEqual(aggregated, bit_strings, delta=1e-10)
            with self.subTest(prior=prior.value, repetitions=reps, guess="tomographic"):
                aggregated = eval_fixed_axes(plan, GuessKind.TOMOGRAPHIC, include_outcomes=False).fidelity
                bit_strings = eval_adaptive_tree(tree, prior, guess=TomographicGuess(plan), include_outcomes=False).fidelity
                self.assertAlmostEqual(aggregated, bit_strings, delta=1e-10)

    def test_one_repetition_equals_three_orthogonal_axes(self) -> None:
        report = eval_fixed_axes(FixedAxesPlan.standard(Prior.SPHERE_3D, 1))
        self.assertAlmostEqual(report.fidelity, (3.0 + math.sqrt(3.0)) / 6.0, places=12)
        self.assertEqual(len(report.outcomes), 8)
        self.assertEqual(report.outcomes[0].outcome, "0:0:0")


class TestGuessOrdering(unittest.TestCase):
    def test_optimal_beats_tomographic(self) -> None:
        for prior in Prior:
            for reps in range(1, 7):
                plan = FixedAxesPlan.standard(prior, reps)
                og = eval_fixed_axes(plan, "optimal", include_outcomes=False).fidelity
                t = eval_fixed_axes(plan, "tomographic", include_outcomes=False).fidelity
                self.assertGreaterEqual(og, t - 1e-12)

    def test_balanced_tuples_are_flagged(self) -> None:
        report = eval_fixed_axes(FixedAxesPlan.standard(Prior.SPHERE_3D, 2), "tomographic")
        ties = [record.outcome for record in report.outcomes if record.tie_break]
        self.assertEqual(ties, ["1:1:1"])
        self.assertTrue(any("balanced" in note for note in report.notes))

    def test_large_repetitions_stay_normalized(self) -> None:
        report = eval_fixed_axes(FixedAxesPlan.standard(Prior.SPHERE_3D, 40), include_outcomes=False)
        self.assertAlmostEqual(report.total_probability, 1.0, places=10)
        self.assertLess(report.fidelity, 121.0 / 122.0)


class TestValidation(unittest.TestCase):
    def test_repetition_cap(self) -> None:
        plan = FixedAxesPlan.standard(Prior.SPHERE_3D, 5)
        with self.assertRaises(CapExceededError):
            eval_fixed_axes(plan, caps=EvaluationCaps(max_repetitions_3d=4))

    def test_prior_must_match_axis_count(self) -> None:
        with self.assertRaises(DimensionMismatchError):
            eval_fixed_axes(FixedAxesPlan.standard(Prior.SPHERE_3D, 1), prior=Prior.CIRCLE_2D)


class TestExactSeries(unittest.TestCase):
    def test_collective_schemes(self) -> None:
        self.assertAlmostEqual(scheme_fidelity("3d-cm", 4), 5.0 / 6.0)
        self.assertAlmostEqual(scheme_fidelity("2d-cm", 1), 0.75)

    def test_fixed_schemes_skip_unrealizable_n(self) -> None:
        self.assertEqual(admissible_copies("3d-og", [3, 4, 5, 6]), [3, 6])
        self.assertEqual(admissible_copies("2d-t", [1, 2, 3, 4]), [2, 4])
        points = exact_series("3d-og", [6, 3, 4, 5])
        self.assertEqual([point.copies for point in points], [3, 6])
        self.assertAlmostEqual(points[0].fidelity, (3.0 + math.sqrt(3.0)) / 6.0, places=12)
        self.assertEqual(points[0].stderr, 0.0)

    def test_default_grids(self) -> None:
        self.assertEqual(default_copies("3d-og"), list(range(42, 181, 3)))
        self.assertEqual(default_copies("3d-cm"), default_copies("3d-t"))
        self.assertEqual(default_copies("2d-og"), list(range(40, 801, 20)))
        small = EvaluationCaps(max_repetitions_3d=20, max_repetitions_2d=30)
        self.assertEqual(default_copies("3d-t", small), [42, 45, 48, 51, 54, 57, 60])
        self.assertEqual(default_copies("2d-og", small), [40, 60])
        self.assertEqual(default_copies("3d-og", EvaluationCaps(max_repetitions_3d=4)), [12])

    def test_no_admissible_n(self) -> None:
        with self.assertRaises(PlanError):
            exact_series("3d-t", [1, 2])

    def test_unknown_scheme(self) -> None:
        with self.assertRaises(UsageError):
            parse_scheme("3d-magic")


if __name__ == "__main__":
    unittest.main()
