"""
Finite Frame Module

Vector families, Gram matrices, frame/Bessel/Riesz bounds, duals and the
partition inequality.
"""
from .family import VectorFamily, label_points, normalize_label
from .bounds import (
    BoundsKind,
    BoundsReport,
    GramMatrix,
    bessel_bound,
    frame_bounds,
    gram,
    gram_entries,
    lambda_min,
    quadratic_form,
    riesz_bounds,
)
from .operators import (
    analysis,
    dual_family,
    dual_pair_residual,
    frame_operator,
    reconstruction_residual,
    spectral_norm,
    synthesis,
)
from .partition import PartitionCheck, partition_inequality_check

__all__ = [
    "VectorFamily",
    "label_points",
    "normalize_label",
    "BoundsKind",
    "BoundsReport",
    "GramMatrix",
    "bessel_bound",
    "frame_bounds",
    "gram",
    "gram_entries",
    "lambda_min",
    "quadratic_form",
    "riesz_bounds",
    "analysis",
    "dual_family",
    "dual_pair_residual",
    "frame_operator",
    "reconstruction_residual",
    "spectral_norm",
    "synthesis",
    "PartitionCheck",
    "partition_inequality_check",
]
