"""
Tail operators and truncated families.

M^R keeps the cross-coefficients <f_i, g_k> at distance ||a(i) - k|| > R;
the truncated family F_R is rebuilt from the coefficients within distance R
using a dual of the reference.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from config import get_config
from density.familymap import IndexedFamilyMap
from density.index_free import coefficient_matrix
from density.relations import fiber_bound
from errors import DimensionMismatchError, DualPairError
from frames.bounds import bessel_bound
from frames.family import VectorFamily
from frames.operators import dual_pair_residual, spectral_norm
from .envelope import Envelope
from .maps import reference_points, envelope_from_map

logger = logging.getLogger(__name__)


@dataclass
class TailNorm:
    radius: int
    norm: float
    schur_bound: float
    fiber: int

    @property
    def within_bound(self) -> bool:
        return self.norm <= self.schur_bound + get_config().tolerance.residual

    def to_dict(self) -> Dict[str, Any]:
        return {"radius": self.radius, "norm": self.norm, "schur_bound": self.schur_bound, "fiber": self.fiber}


def _distances(fmap: IndexedFamilyMap, family: VectorFamily, reference: VectorFamily) -> np.ndarray:
    """||a(i) - k||_inf for every (i, k) pair, shape (|F|, |G|)"""
    group = fmap.group
    a_pts = fmap.points_of(family.labels)
    g_pts = reference_points(reference, group)
    return group.distance(a_pts[:, None, :], g_pts[None, :, :])


def tail_matrix(family: VectorFamily, fmap: IndexedFamilyMap, reference: VectorFamily, R: int) -> np.ndarray:
    C = coefficient_matrix(family, reference)
    return np.where(_distances(fmap, family, reference) > R, C, 0.0)


def tail_operator_norm(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    R: int,
    envelope: Optional[Envelope] = None,
) -> TailNorm:
    """
    ||M^R|| next to the Schur bound Delta_r(R) * sqrt(K).

    Without an explicit envelope the minimal one is extracted from the triple.
    """
    if envelope is None:
        envelope = envelope_from_map(family, fmap, reference).envelope
    M = tail_matrix(family, fmap, reference, R)
    K = fiber_bound(fmap)
    result = TailNorm(radius=int(R), norm=spectral_norm(M), schur_bound=envelope.tail_sum(R) * np.sqrt(K), fiber=K)
    logger.debug("R=%d: ||M^R|| = %.3e, Schur bound %.3e", R, result.norm, result.schur_bound)
    return result


def truncate_family(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    dual: VectorFamily,
    R: int,
) -> VectorFamily:
    """
    f_iR = sum over ||a(i) - n||_inf <= R of <f_i, g_n> g~_n.

    The pair (reference, dual) must reconstruct every vector of the ambient
    space; otherwise DualPairError is raised with the residual.
    """
    residual = dual_pair_residual(reference, dual)
    if residual >= get_config().tolerance.residual:
        raise DualPairError(f"reference and dual do not reconstruct (residual {residual:.3e})", residual=residual)
    C = coefficient_matrix(family, reference)
    kept = np.where(_distances(fmap, family, reference) <= R, C, 0.0)
    return family.with_matrix(dual.matrix @ kept.T)


def analysis_gap_norm(family: VectorFamily, truncated: VectorFamily) -> float:
    """Operator norm of h -> {<h, f_i - f_iR>}"""
    if len(family) != len(truncated) or family.dim != truncated.dim:
        raise DimensionMismatchError(
            f"families differ in shape: {family.dim}x{len(family)} vs {truncated.dim}x{len(truncated)}"
        )
    return spectral_norm(family.matrix - truncated.matrix)


def truncation_gap_bound(tail_norm: float, dual: VectorFamily) -> float:
    """||M^R|| * sqrt(Bessel bound of the dual)"""
    return float(tail_norm * np.sqrt(bessel_bound(dual)))


def truncation_profile(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    dual: VectorFamily,
    radii,
) -> Dict[int, Dict[str, float]]:
    """Gap, tail norm and both bounds at each radius"""
    envelope = envelope_from_map(family, fmap, reference).envelope
    B = bessel_bound(dual)
    out = {}
    for R in radii:
        tail = tail_operator_norm(family, fmap, reference, R, envelope)
        gap = analysis_gap_norm(family, truncate_family(family, fmap, reference, dual, R))
        out[int(R)] = {
            "gap": gap,
            "tail_norm": tail.norm,
            "schur_bound": tail.schur_bound,
            "gap_bound": tail.norm * float(np.sqrt(B)),
        }
    return out
