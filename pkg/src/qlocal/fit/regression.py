from __future__ import annotations

import math

import numpy as np

from qlocal.errors import SingularDesignError
from qlocal.fit.models import FidelitySeries, FitModel, FitResult

MIN_POINTS = 4
DEFAULT_MIN_COPIES = 40

# Power of 1/N carried by each model term.
TERM_ORDERS = {"c": 1.0, "h": 1.5, "d": 2.0}


def fit_leading_coefficient(
    series: FidelitySeries,
    model: FitModel | str = FitModel.WITH_CORRECTION,
    min_copies: int | None = DEFAULT_MIN_COPIES,
    max_copies: int | None = None,
) -> FitResult:
    """Weighted least squares of 1 - F against 1/N.

    The model is 1 - F = c/N, c/N + d/N^2, or c/N + h/N^(3/2) + d/N^2.
    Simulated points are weighted by 1/stderr^2. Coefficient errors use the
    residual-scaled covariance, so a common rescaling of the stderrs changes
    neither c nor its error.
    """
    chosen = FitModel.parse(model)
    used = series.restricted(min_copies, max_copies)
    if len(used.points) < MIN_POINTS:
        raise ValueError(
            f"series {series.scheme!r} has {len(used.points)} point(s) in range; at least {MIN_POINTS} are needed"
        )
    copies = np.array(used.copies, dtype=float)
    fidelity = np.array([point.fidelity for point in used.points])
    if np.any(fidelity >= 1.0):
        raise ValueError(f"series {series.scheme!r} contains F >= 1; 1 - F must stay positive")
    stderr = np.array([point.stderr for point in used.points])
    if np.any(stderr > 0.0) and not np.all(stderr > 0.0):
        raise ValueError(f"series {series.scheme!r} mixes exact and sampled points")

    x = 1.0 / copies
    y = 1.0 - fidelity
    design = np.stack([x ** TERM_ORDERS[term] for term in chosen.terms], axis=1)
    weights = 1.0 / stderr**2 if np.all(stderr > 0.0) else np.ones_like(y)
    root = np.sqrt(weights)
    weighted_design = design * root[:, None]
    weighted_y = y * root

    if np.linalg.matrix_rank(weighted_design) < design.shape[1]:
        raise SingularDesignError(f"series {series.scheme!r}: design matrix is singular (too few distinct N)")
    coefficients, _, _, _ = np.linalg.lstsq(weighted_design, weighted_y, rcond=None)
    residuals = weighted_y - weighted_design @ coefficients
    rss = float(residuals @ residuals)
    dof = len(y) - design.shape[1]
    scale = rss / dof if dof > 0 else 0.0
    covariance = scale * np.linalg.inv(weighted_design.T @ weighted_design)
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    notes = []
    if series.source.value == "simulated" and dof > 0:
        notes.append(f"reduced chi-square {scale:.3f}")
    fitted = dict(zip(chosen.terms, zip(coefficients, errors)))
    return FitResult(
        scheme=series.scheme,
        model=chosen,
        c=float(fitted["c"][0]),
        c_stderr=float(fitted["c"][1]),
        residual=math.sqrt(rss),
        points_used=len(y),
        min_copies=int(copies.min()),
        max_copies=int(copies.max()),
        d=float(fitted["d"][0]) if "d" in fitted else None,
        d_stderr=float(fitted["d"][1]) if "d" in fitted else None,
        h=float(fitted["h"][0]) if "h" in fitted else None,
        h_stderr=float(fitted["h"][1]) if "h" in fitted else None,
        notes=tuple(notes),
    )


__all__ = ["MIN_POINTS", "DEFAULT_MIN_COPIES", "TERM_ORDERS", "fit_leading_coefficient"]
