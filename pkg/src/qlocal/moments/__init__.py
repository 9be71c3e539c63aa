from __future__ import annotations

from qlocal.moments.polynomial import (
    PosteriorVector,
    SpherePolynomial,
    integrate,
    multiply_linear_factor,
    posterior_vector,
)
from qlocal.moments.quadrature import SphereQuadrature, quadrature_moment
from qlocal.moments.tables import MomentTable, circle_moment, sphere_moment

__all__ = [
    "PosteriorVector",
    "SpherePolynomial",
    "integrate",
    "multiply_linear_factor",
    "posterior_vector",
    "SphereQuadrature",
    "quadrature_moment",
    "MomentTable",
    "circle_moment",
    "sphere_moment",
]
