from __future__ import annotations

from qlocal.evaluate.bounds import (
    BoundOrderingReport,
    GapRow,
    cm_bound,
    cm_bound_2d,
    cm_bound_3d,
    fidelity_gap_table,
    verify_bound_ordering,
)
from qlocal.evaluate.dispatch import default_prior, evaluate_strategy
from qlocal.evaluate.fixed_axes import FixedAxesTables, eval_fixed_axes, fixed_axes_posteriors
from qlocal.evaluate.models import EvaluationCaps, FidelityReport, OutcomeRecord, SeriesPoint
from qlocal.evaluate.series import EXACT_SCHEMES, exact_series, scheme_fidelity
from qlocal.evaluate.tree import LeafTable, eval_adaptive_tree, leaf_table

__all__ = [
    "default_prior",
    "evaluate_strategy",
    "BoundOrderingReport",
    "GapRow",
    "cm_bound",
    "cm_bound_2d",
    "cm_bound_3d",
    "fidelity_gap_table",
    "verify_bound_ordering",
    "FixedAxesTables",
    "eval_fixed_axes",
    "fixed_axes_posteriors",
    "EvaluationCaps",
    "FidelityReport",
    "OutcomeRecord",
    "SeriesPoint",
    "EXACT_SCHEMES",
    "exact_series",
    "scheme_fidelity",
    "LeafTable",
    "eval_adaptive_tree",
    "leaf_table",
]
