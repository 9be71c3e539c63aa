from __future__ import annotations

import unittest

import numpy as np

from qlocal.core.bloch import BlochVector, Prior
from qlocal.errors import DimensionMismatchError
from qlocal.moments.polynomial import (
    SpherePolynomial,
    integrate,
    integrate_cubes,
    multiply_cubes,
    multiply_linear_factor,
    posterior_cubes,
    posterior_vector,
)
from qlocal.moments.quadrature import SphereQuadrature, quadrature_moment
from qlocal.moments.tables import MomentTable, circle_moment, sphere_moment


class TestClosedForms(unittest.TestCase):
    def test_sphere_values(self) -> None:
        self.assertAlmostEqual(sphere_moment(0, 0, 0), 1.0, places=14)
        self.assertAlmostEqual(sphere_moment(2, 0, 0), 1.0 / 3.0, places=14)
        self.assertAlmostEqual(sphere_moment(2, 2, 0), 1.0 / 15.0, places=14)
        self.assertEqual(sphere_moment(1, 0, 0), 0.0)
        self.assertEqual(sphere_moment(2, 1, 2), 0.0)

    def test_circle_values(self) -> None:
        self.assertAlmostEqual(circle_moment(2, 0), 0.5, places=14)
        self.assertAlmostEqual(circle_moment(2, 2), 0.125, places=14)
        self.assertEqual(circle_moment(3, 0), 0.0)

    def test_rejects_negative_exponent(self) -> None:
        with self.assertRaises(ValueError):
            sphere_moment(-1, 0, 0)

    def test_sphere_matches_quadrature_low_degrees(self) -> None:
        for total in range(0, 25):
            for p in range(total + 1):
                for q in range(total - p + 1):
                    r = total - p - q
                    exact = sphere_moment(p, q, r)
                    approx = quadrature_moment(Prior.SPHERE_3D, p, q, r)
                    if exact == 0.0:
                        self.assertLess(abs(approx), 1e-13, (p, q, r))
                    else:
                        self.assertLess(abs(approx - exact) / exact, 1e-10, (p, q, r))

    def test_sphere_matches_quadrature_to_degree_sixty(self) -> None:
        for p in range(0, 61, 2):
            for q in range(0, 61 - p, 2):
                for r in range(0, 61 - p - q, 2):
                    exact = sphere_moment(p, q, r)
                    approx = quadrature_moment(Prior.SPHERE_3D, p, q, r)
                    self.assertLess(abs(approx - exact) / exact, 1e-10, (p, q, r))

    def test_circle_matches_quadrature_to_degree_sixty(self) -> None:
        for p in range(0, 61):
            for q in range(0, 61 - p):
                exact = circle_moment(p, q)
                approx = quadrature_moment(Prior.CIRCLE_2D, p, q)
                if exact == 0.0:
                    self.assertLess(abs(approx), 1e-13, (p, q))
                else:
                    self.assertLess(abs(approx - exact) / exact, 1e-10, (p, q))


class TestMomentTable(unittest.TestCase):
    def test_cube_entries_match_closed_form(self) -> None:
        cube = MomentTable.cube(Prior.SPHERE_3D, 7)
        for p, q, r in [(0, 0, 0), (2, 0, 4), (6, 2, 0), (1, 2, 2)]:
            self.assertAlmostEqual(float(cube[p, q, r]), sphere_moment(p, q, r), places=14)

    def test_circle_cube_has_no_z_terms(self) -> None:
        cube = MomentTable.cube(Prior.CIRCLE_2D, 5)
        self.assertTrue(np.all(cube[:, :, 1:] == 0.0))
        self.assertAlmostEqual(float(cube[2, 2, 0]), 0.125, places=14)

    def test_cubes_are_read_only_and_grow(self) -> None:
        small = MomentTable.cube(Prior.SPHERE_3D, 3)
        with self.assertRaises(ValueError):
            small[0, 0, 0] = 2.0
        large = MomentTable.cube(Prior.SPHERE_3D, 40)
        self.assertEqual(large.shape, (40, 40, 40))
        self.assertEqual(float(large[2, 0, 0]), float(small[2, 0, 0]))


class TestQuadrature(unittest.TestCase):
    def test_weights_sum_to_one(self) -> None:
        for prior in Prior:
            rule = SphereQuadrature.for_degree(11, prior)
            self.assertAlmostEqual(float(np.sum(rule.weights)), 1.0, places=14)
            self.assertTrue(np.all(rule.weights > 0.0))

    def test_nodes_lie_on_the_sphere(self) -> None:
        rule = SphereQuadrature.for_degree(9, Prior.SPHERE_3D)
        np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)


class TestPolynomial(unittest.TestCase):
    def test_single_factor_along_z(self) -> None:
        poly = multiply_linear_factor(SpherePolynomial.constant(), BlochVector(0.0, 0.0, 1.0))
        self.assertEqual(poly.degree, 1)
        self.assertEqual(poly.terms(), {(0, 0, 0): 0.5, (0, 0, 1): 0.5})
        self.assertAlmostEqual(integrate(poly, Prior.SPHERE_3D), 0.5)
        posterior = posterior_vector(poly, Prior.SPHERE_3D)
        np.testing.assert_allclose(posterior.array, [0.0, 0.0, 1.0 / 6.0], atol=1e-15)

    def test_circle_prior_rejects_z_terms(self) -> None:
        poly = multiply_linear_factor(SpherePolynomial.constant(), BlochVector(0.0, 0.0, 1.0))
        with self.assertRaises(DimensionMismatchError):
            posterior_vector(poly, Prior.CIRCLE_2D)

    def test_single_factor_on_the_circle(self) -> None:
        poly = multiply_linear_factor(SpherePolynomial.constant(), BlochVector(1.0, 0.0, 0.0, dim=2))
        self.assertFalse(poly.has_z_terms())
        posterior = posterior_vector(poly, Prior.CIRCLE_2D)
        np.testing.assert_allclose(posterior.array, [0.25, 0.0, 0.0], atol=1e-15)

    def test_from_terms_and_coefficient_lookup(self) -> None:
        poly = SpherePolynomial.from_terms({(1, 0, 0): 2.0, (0, 2, 0): -1.0})
        self.assertEqual(poly.degree, 2)
        self.assertEqual(poly.coefficient(1, 0, 0), 2.0)
        self.assertEqual(poly.coefficient(5, 0, 0), 0.0)
        self.assertAlmostEqual(integrate(poly, Prior.SPHERE_3D), -1.0 / 3.0)

    def test_cube_stack_matches_polynomial_path(self) -> None:
        first = BlochVector(0.0, 0.0, 1.0)
        second = BlochVector(0.6, 0.0, 0.8)
        poly = multiply_linear_factor(multiply_linear_factor(SpherePolynomial.constant(), first), -second)

        cubes = np.zeros((1, 3, 3, 3))
        cubes[0, 0, 0, 0] = 1.0
        cubes = multiply_cubes(cubes, first.array[None, :])
        cubes = multiply_cubes(cubes, -second.array[None, :])
        np.testing.assert_allclose(cubes[0], poly.coefficients, atol=1e-15)
        self.assertAlmostEqual(float(integrate_cubes(cubes, Prior.SPHERE_3D)[0]), integrate(poly, Prior.SPHERE_3D))
        np.testing.assert_allclose(
            posterior_cubes(cubes, Prior.SPHERE_3D)[0], posterior_vector(poly, Prior.SPHERE_3D).array, atol=1e-15
        )


if __name__ == "__main__":
    unittest.main()
