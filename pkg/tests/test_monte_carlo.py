from __future__ import annotations

import math
import tempfile
import unittest
from pathlib import Path

from qlocal.core.bloch import BlochVector, Prior
from qlocal.errors import PlanError
from qlocal.simulate.ledger import append_results, read_ledger
from qlocal.simulate.models import ExactComparison, SimulationConfig, SimulationResult
from qlocal.simulate.runner import compare_exact, simulate
from qlocal.strategy.guesses import ConstantGuess
from qlocal.strategy.models import AdaptiveTree, FixedAxesPlan

X = BlochVector(1.0, 0.0, 0.0)
Y = BlochVector(0.0, 1.0, 0.0)
Z = BlochVector(0.0, 0.0, 1.0)


def optimal_two_copy_tree() -> AdaptiveTree:
    return AdaptiveTree.from_nodes(2, {"": Z, "0": X, "1": Y})


class TestAgreementWithExact(unittest.TestCase):
    def test_two_copy_tree(self) -> None:
        comparison = compare_exact(optimal_two_copy_tree(), trials=200_000, seed=11)
        self.assertAlmostEqual(comparison.exact, (3.0 + math.sqrt(2.0)) / 6.0, places=12)
        self.assertTrue(comparison.passed, comparison.to_dict())

    def test_seed_battery_on_fixed_axes(self) -> None:
        plan = FixedAxesPlan.standard(Prior.SPHERE_3D, 2)
        for seed in range(20):
            with self.subTest(seed=seed):
                comparison = compare_exact(plan, trials=20_000, seed=seed)
                self.assertLessEqual(abs(comparison.z_score), 4.0)

    def test_tomographic_guess_on_the_circle(self) -> None:
        plan = FixedAxesPlan.standard(Prior.CIRCLE_2D, 3)
        comparison = compare_exact(plan, trials=100_000, seed=5, guess="tomographic")
        self.assertTrue(comparison.passed, comparison.to_dict())
        self.assertEqual(comparison.simulation.scheme, "2d-t")

    def test_adaptive_tree_on_the_circle(self) -> None:
        tree = AdaptiveTree.from_nodes(2, {"": [1.0, 0.0], "0": [0.0, 1.0], "1": [0.0, 1.0]})
        comparison = compare_exact(tree, trials=100_000, seed=6)
        self.assertIs(comparison.simulation.prior, Prior.CIRCLE_2D)
        self.assertTrue(comparison.passed, comparison.to_dict())

    def test_constant_guess_averages_one_half(self) -> None:
        result = simulate(AdaptiveTree.fixed([Z]), trials=100_000, seed=2, guess=ConstantGuess(Z))
        self.assertLessEqual(abs(result.mean - 0.5), 4.0 * result.stderr)


class TestReproducibility(unittest.TestCase):
    def test_same_seed_any_thread_count(self) -> None:
        tree = optimal_two_copy_tree()
        first = simulate(tree, trials=10_000, seed=3, threads=1, block_size=1000)
        second = simulate(tree, trials=10_000, seed=3, threads=4, block_size=1000)
        self.assertEqual(first.mean, second.mean)
        self.assertEqual(first.stderr, second.stderr)

    def test_different_seeds_differ(self) -> None:
        tree = optimal_two_copy_tree()
        self.assertNotEqual(simulate(tree, trials=5000, seed=1).mean, simulate(tree, trials=5000, seed=2).mean)

    def test_block_sizes_cover_every_trial(self) -> None:
        self.assertEqual(SimulationConfig(trials=10, seed=0, block_size=4).block_sizes, [4, 4, 2])
        self.assertEqual(SimulationConfig(trials=8, seed=0, block_size=4).block_sizes, [4, 4])


class TestResults(unittest.TestCase):
    def test_result_metadata(self) -> None:
        result = simulate(FixedAxesPlan.standard(Prior.SPHERE_3D, 1), trials=1000, seed=9)
        self.assertEqual((result.scheme, result.copies, result.trials, result.seed), ("3d-og", 3, 1000, 9))
        self.assertTrue(0.0 <= result.mean <= 1.0)
        self.assertEqual(len(result.strategy_hash), 12)

    def test_tomographic_guess_needs_fixed_axes(self) -> None:
        with self.assertRaises(PlanError):
            simulate(optimal_two_copy_tree(), trials=100, seed=0, guess="tomographic")

    def test_z_score_without_spread(self) -> None:
        result = SimulationResult(1, 0.5, 0.0, 0, "fixed-axes", "abc", "3d-og", Prior.SPHERE_3D, 3)
        self.assertEqual(ExactComparison(result, 0.5).z_score, 0.0)
        self.assertFalse(ExactComparison(result, 0.6).passed)
        self.assertTrue(ExactComparison(result, 0.75, offset=-0.25).passed)


class TestLedger(unittest.TestCase):
    def test_append_and_read(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "ledger.csv"
            first = simulate(optimal_two_copy_tree(), trials=1000, seed=1)
            second = simulate(optimal_two_copy_tree(), trials=1000, seed=2)
            append_results([first], path)
            append_results([second], path)
            text = path.read_text(encoding="utf-8")
            self.assertEqual(text.count("strategy_hash"), 1)
            rows = read_ledger(path)
            self.assertEqual([row.seed for row in rows], [1, 2])
            self.assertEqual(rows[0].mean, first.mean)
            self.assertEqual(rows[1].copies, 2)

    def test_malformed_rows(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "ledger.csv"
            path.write_text("strategy_hash,scheme,prior,N,trials,seed,mean,stderr\nabc,3d-og,3d,x,1,1,0.5,0.1\n")
            with self.assertRaises(PlanError):
                read_ledger(path)


if __name__ == "__main__":
    unittest.main()
