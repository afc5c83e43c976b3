"""
Partition inequality for Riesz sequences.

For a Riesz sequence with bounds A <= B and any partition {I_j} of its
index set,

    (A/B) sum_j ||sum_{I_j} a_i f_i||^2 <= ||sum a_i f_i||^2 <= (B/A) sum_j ||sum_{I_j} a_i f_i||^2
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from config import get_config
from errors import PartitionError, SingularOperatorError
from .bounds import quadratic_form, riesz_bounds
from .family import VectorFamily


@dataclass
class PartitionCheck:
    lhs: float
    mid: float
    rhs: float
    holds: bool
    slack: float  # min(mid - lhs, rhs - mid), scaled by ||a||^2

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "mid": self.mid, "rhs": self.rhs, "holds": self.holds, "slack": self.slack}


def _validate_partition(family: VectorFamily, partition: Sequence[Iterable[Any]]) -> List[List[int]]:
    blocks = [[family.index_of(l) for l in block] for block in partition]
    flat = [j for block in blocks for j in block]
    if len(flat) != len(set(flat)):
        raise PartitionError("index sets overlap")
    if len(flat) != len(family):
        raise PartitionError(f"index sets cover {len(flat)} of {len(family)} indices")
    return blocks


def partition_inequality_check(
    family: VectorFamily,
    partition: Sequence[Iterable[Any]],
    a: np.ndarray,
) -> PartitionCheck:
    """Evaluate both sides of the partition inequality for one coefficient vector"""
    blocks = _validate_partition(family, partition)
    bounds = riesz_bounds(family)
    if bounds.lower <= 0.0:
        raise SingularOperatorError("partition inequality needs a Riesz sequence (lower bound is 0)")
    ratio = bounds.lower / bounds.upper
    a = np.asarray(a, dtype=np.complex128)

    pieces = 0.0
    for block in blocks:
        if not block:
            continue
        pieces += quadratic_form(family.take(block), a[block])

    lhs = ratio * pieces
    mid = quadratic_form(family, a)
    rhs = pieces / ratio
    scale = max(float(np.real(np.vdot(a, a))), 1e-300)
    slack = min(mid - lhs, rhs - mid) / scale
    tol = get_config().tolerance.residual
    return PartitionCheck(lhs=lhs, mid=mid, rhs=rhs, holds=slack >= -tol, slack=slack)
