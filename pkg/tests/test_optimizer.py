from __future__ import annotations

import math
import os
import unittest

import numpy as np

from qlocal.core.bloch import Prior, make_rng
from qlocal.errors import CapExceededError
from qlocal.evaluate.tree import eval_adaptive_tree
from qlocal.optimize.models import OptimizationConfig
from qlocal.optimize.objective import TreeObjective
from qlocal.optimize.search import heuristic_directions, optimize_tree, random_parameters, run_restart
from qlocal.optimize.structure import prefix_guess, structure_report
from qlocal.strategy.models import AdaptiveTree

SLOW = bool(os.environ.get("QLOCAL_SLOW_TESTS"))


class TestTreeObjective(unittest.TestCase):
    def test_matches_exact_evaluator(self) -> None:
        for prior in Prior:
            for gauge in (True, False):
                objective = TreeObjective(3, prior, gauge_fixed=gauge)
                params = random_parameters(objective, make_rng(5))
                with self.subTest(prior=prior.value, gauge=gauge):
                    exact = eval_adaptive_tree(objective.tree(params), prior, include_outcomes=False).fidelity
                    self.assertAlmostEqual(objective.fidelity(params), exact, places=12)
                    self.assertAlmostEqual(objective(params), -exact, places=12)

    def test_parameter_count(self) -> None:
        self.assertEqual(TreeObjective(1, Prior.SPHERE_3D).size, 0)
        self.assertEqual(TreeObjective(2, Prior.SPHERE_3D).size, 3)
        self.assertEqual(TreeObjective(2, Prior.SPHERE_3D, gauge_fixed=False).size, 6)
        self.assertEqual(TreeObjective(2, Prior.CIRCLE_2D).size, 2)
        self.assertEqual(TreeObjective(3, Prior.CIRCLE_2D, gauge_fixed=False).size, 7)

    def test_gauge_pins_root_and_first_child(self) -> None:
        objective = TreeObjective(3, Prior.SPHERE_3D)
        rows = objective.directions(random_parameters(objective, make_rng(9)))
        np.testing.assert_allclose(rows[0], [0.0, 0.0, 1.0], atol=1e-15)
        self.assertAlmostEqual(float(rows[1, 1]), 0.0, places=15)

    def test_parameters_round_trip(self) -> None:
        objective = TreeObjective(3, Prior.SPHERE_3D, gauge_fixed=False)
        params = random_parameters(objective, make_rng(3))
        again = objective.parameters_for(objective.directions(params))
        np.testing.assert_allclose(objective.directions(again), objective.directions(params), atol=1e-12)

    def test_heuristic_start_for_three_copies_is_orthogonal(self) -> None:
        rows = heuristic_directions(3, Prior.SPHERE_3D)
        for history in ("00", "01", "10", "11"):
            path = [rows[AdaptiveTree.node_index(history[k:])] for k in range(3)]
            gram = np.abs(np.array(path) @ np.array(path).T)
            np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)


class TestRestart(unittest.TestCase):
    def test_restart_never_loses_fidelity(self) -> None:
        objective = TreeObjective(2, Prior.SPHERE_3D)
        start = random_parameters(objective, make_rng(17))
        outcome = run_restart(objective, start, OptimizationConfig(restarts=1), index=0, initializer="random")
        self.assertGreaterEqual(outcome.fidelity, objective.fidelity(start))
        self.assertEqual(outcome.history[0], objective.fidelity(start))


class TestOptimizeTree(unittest.TestCase):
    def test_single_copy(self) -> None:
        result = optimize_tree(1, config=OptimizationConfig(restarts=2, seed=0))
        self.assertAlmostEqual(result.fidelity, 2.0 / 3.0, places=12)

    def test_two_copies(self) -> None:
        result = optimize_tree(2, config=OptimizationConfig(restarts=4, seed=1))
        self.assertAlmostEqual(result.fidelity, (3.0 + math.sqrt(2.0)) / 6.0, delta=1e-6)
        rows = result.tree.directions
        self.assertLess(abs(float(rows[0] @ rows[1])), 1e-4)
        self.assertLess(abs(float(rows[0] @ rows[2])), 1e-4)
        self.assertEqual(result.report.strategy, "optimized-tree")

    def test_three_copies(self) -> None:
        result = optimize_tree(3, config=OptimizationConfig(restarts=3, seed=2))
        self.assertAlmostEqual(result.fidelity, (3.0 + math.sqrt(3.0)) / 6.0, delta=1e-6)
        self.assertFalse(structure_report(result.tree).history_dependent)

    def test_two_copies_on_the_circle(self) -> None:
        result = optimize_tree(2, Prior.CIRCLE_2D, OptimizationConfig(restarts=3, seed=4))
        self.assertTrue(result.tree.is_planar)
        self.assertLessEqual(result.fidelity, 0.5 + math.sqrt(2.0) / 4.0 + 1e-9)
        self.assertGreater(result.fidelity, 0.75)

    def test_gauge_does_not_change_the_optimum(self) -> None:
        pinned = optimize_tree(2, config=OptimizationConfig(restarts=3, seed=6))
        free = optimize_tree(2, config=OptimizationConfig(restarts=3, seed=6, gauge_fixed=False))
        self.assertAlmostEqual(pinned.fidelity, free.fidelity, delta=1e-6)

    def test_seeded_runs_repeat_exactly(self) -> None:
        config = OptimizationConfig(restarts=3, seed=7)
        first = optimize_tree(2, config=config, threads=1)
        second = optimize_tree(2, config=config, threads=3)
        self.assertEqual(first.restart_fidelities, second.restart_fidelities)
        np.testing.assert_array_equal(first.tree.directions, second.tree.directions)
        self.assertEqual(first.seed, 7)

    def test_best_restart_is_reported(self) -> None:
        result = optimize_tree(2, config=OptimizationConfig(restarts=3, seed=8))
        self.assertEqual(result.fidelity, result.report.fidelity)
        self.assertGreaterEqual(result.restarts[result.best_restart].fidelity, max(result.restart_fidelities) - 1e-15)
        meta = result.meta_dict()
        self.assertEqual(meta["seed"], 8)
        self.assertEqual(len(meta["restarts"]), 3)

    def test_depth_cap(self) -> None:
        with self.assertRaises(CapExceededError):
            optimize_tree(9, config=OptimizationConfig(restarts=1, seed=0))

    def test_config_validation(self) -> None:
        with self.assertRaises(ValueError):
            OptimizationConfig(restarts=0)
        with self.assertRaises(ValueError):
            OptimizationConfig(tolerance=0.0)


@unittest.skipUnless(SLOW, "set QLOCAL_SLOW_TESTS=1 to run the N=4..6 optimizations")
class TestHigherDepths(unittest.TestCase):
    def test_four_copies(self) -> None:
        result = optimize_tree(4, config=OptimizationConfig(restarts=20, seed=2024))
        self.assertAlmostEqual(result.fidelity, 0.8206, delta=5e-4)
        self.assertTrue(structure_report(result.tree).history_dependent)
        # The third copy measures in the plane orthogonal to the guess formed from the first two outcomes.
        limit = math.sin(math.radians(2.0))
        for history in AdaptiveTree.histories(2):
            guess = prefix_guess(result.tree, history)
            with self.subTest(history=history):
                self.assertLess(abs(result.tree.direction(history).dot(guess)), limit)

    def test_five_copies(self) -> None:
        result = optimize_tree(5, config=OptimizationConfig(restarts=20, seed=2025))
        self.assertAlmostEqual(result.fidelity, 0.8450, delta=5e-4)

    def test_six_copies(self) -> None:
        result = optimize_tree(6, config=OptimizationConfig(restarts=20, seed=2026))
        self.assertAlmostEqual(result.fidelity, 0.8637, delta=5e-4)


if __name__ == "__main__":
    unittest.main()
