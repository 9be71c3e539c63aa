from __future__ import annotations

from qlocal.core.bloch import (
    BlochVector,
    Prior,
    fidelity_overlap,
    generate_seed,
    make_rng,
    normalize,
    outcome_probability,
    rotate,
    rotation_matrix,
    sample_prior,
    spawn_seeds,
)

__all__ = [
    "BlochVector",
    "Prior",
    "fidelity_overlap",
    "generate_seed",
    "make_rng",
    "normalize",
    "outcome_probability",
    "rotate",
    "rotation_matrix",
    "sample_prior",
    "spawn_seeds",
]
