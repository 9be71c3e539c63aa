from __future__ import annotations

import math
import unittest

from qlocal.core.bloch import BlochVector, Prior
from qlocal.evaluate.bounds import cm_bound, cm_bound_2d, cm_bound_3d, fidelity_gap_table, verify_bound_ordering
from qlocal.evaluate.tree import eval_adaptive_tree
from qlocal.strategy.models import AdaptiveTree


class TestCollectiveBounds(unittest.TestCase):
    def test_circle_bound_small_n(self) -> None:
        self.assertAlmostEqual(cm_bound_2d(1), 0.75, places=14)
        self.assertAlmostEqual(cm_bound_2d(2), 0.5 + math.sqrt(2.0) / 4.0, places=14)

    def test_sphere_bound(self) -> None:
        self.assertAlmostEqual(cm_bound_3d(1), 2.0 / 3.0, places=14)
        self.assertAlmostEqual(cm_bound_3d(4), 5.0 / 6.0, places=14)
        self.assertEqual(cm_bound(Prior.SPHERE_3D, 2), 0.75)

    def test_circle_bound_large_n_is_finite(self) -> None:
        value = cm_bound_2d(10_000)
        self.assertTrue(0.99 < value < 1.0)
        # 1 - F ~ 1/(4N)
        self.assertAlmostEqual(10_000 * (1.0 - value), 0.25, delta=0.01)

    def test_rejects_zero_copies(self) -> None:
        with self.assertRaises(ValueError):
            cm_bound_2d(0)
        with self.assertRaises(ValueError):
            cm_bound_3d(0)

    def test_ordering_holds(self) -> None:
        report = verify_bound_ordering(200)
        self.assertTrue(report.ordering_holds)
        self.assertEqual(len(report.rows), 200)
        self.assertTrue(report.passed)

    def test_local_reports_stay_below_bound(self) -> None:
        tree = AdaptiveTree.fixed([BlochVector(0.0, 0.0, 1.0), BlochVector(1.0, 0.0, 0.0)])
        local = eval_adaptive_tree(tree, Prior.SPHERE_3D)
        report = verify_bound_ordering(3, [local])
        self.assertTrue(report.local_within_bounds)
        self.assertEqual(report.to_dict()["local_checks"][0]["N"], 2)

    def test_gap_table(self) -> None:
        rows = fidelity_gap_table({4: 0.8206, 2: (3.0 + math.sqrt(2.0)) / 6.0})
        self.assertEqual([row.copies for row in rows], [2, 4])
        self.assertAlmostEqual(rows[1].cm_fidelity, 5.0 / 6.0)
        self.assertAlmostEqual(rows[1].gap, 5.0 / 6.0 - 0.8206)
        self.assertGreater(rows[0].relative_gap, 0.0)


if __name__ == "__main__":
    unittest.main()
