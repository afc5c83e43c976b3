"""
Frame, Bessel and Riesz Bounds

Gram matrices and the spectral bounds derived from them.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from config import get_config
from errors import SingularOperatorError
from .family import VectorFamily

logger = logging.getLogger(__name__)


class BoundsKind(Enum):
    """Which inequality a report bounds"""
    FRAME = "frame"
    BESSEL = "bessel"
    RIESZ = "riesz"


@dataclass
class Certificate:
    """Extremal eigenpairs backing a bounds report"""
    lower_value: float
    upper_value: float
    lower_vector: Optional[np.ndarray] = None
    upper_vector: Optional[np.ndarray] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"lower_value": self.lower_value, "upper_value": self.upper_value}


@dataclass
class BoundsReport:
    """
    Lower and upper bounds of one kind, with the eigenpairs that attain them.
    """
    lower: float
    upper: float
    kind: BoundsKind
    certificate: Certificate
    rank: int = 0
    rank_deficient: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "kind": self.kind.value,
            "rank": self.rank,
            "rank_deficient": self.rank_deficient,
            "certificate": self.certificate.to_dict(),
        }


@dataclass
class GramMatrix:
    """Hermitian PSD matrix of inner products <f_i, f_j>"""
    entries: np.ndarray
    labels: tuple = field(default_factory=tuple)

    def eigenvalues(self) -> np.ndarray:
        return clamp_psd(np.linalg.eigvalsh(self.entries))

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def clamp_psd(eigenvalues: np.ndarray, eig_rel: Optional[float] = None) -> np.ndarray:
    """Zero out negative eigenvalues within the relative tolerance"""
    eig_rel = get_config().tolerance.eig_rel if eig_rel is None else eig_rel
    eigenvalues = np.asarray(eigenvalues, dtype=float).copy()
    if eigenvalues.size == 0:
        return eigenvalues
    scale = max(float(np.max(np.abs(eigenvalues))), 0.0)
    tiny = (eigenvalues < 0) & (eigenvalues >= -eig_rel * scale)
    eigenvalues[tiny] = 0.0
    return eigenvalues


def gram_entries(family: VectorFamily) -> np.ndarray:
    T = family.matrix
    C = T.T @ T.conj()  # C[i, j] = sum_t f_i(t) conj(f_j(t))
    return (C + C.conj().T) / 2


def gram(family: VectorFamily) -> GramMatrix:
    """Gram matrix with entries <f_i, f_j>"""
    if len(family) == 0:
        raise ValueError("Gram matrix of an empty family")
    return GramMatrix(gram_entries(family), family.labels)


def lambda_min(family: VectorFamily) -> float:
    """Smallest Gram eigenvalue, the optimal lower Riesz bound"""
    if len(family) == 0:
        return 0.0
    return float(clamp_psd(np.linalg.eigvalsh(gram_entries(family)))[0])


def riesz_bounds(family: VectorFamily) -> BoundsReport:
    """
    Optimal Riesz bounds: extreme eigenvalues of the Gram matrix.

    A family with linearly dependent vectors gets lower bound 0.
    """
    G = gram(family)
    values, vectors = np.linalg.eigh(G.entries)
    values = clamp_psd(values)
    cert = Certificate(
        lower_value=float(values[0]),
        upper_value=float(values[-1]),
        lower_vector=vectors[:, 0],
        upper_vector=vectors[:, -1],
    )
    rank = int(np.sum(values > get_config().tolerance.eig_rel * max(values[-1], 0.0)))
    return BoundsReport(
        lower=float(values[0]),
        upper=float(values[-1]),
        kind=BoundsKind.RIESZ,
        certificate=cert,
        rank=rank,
        rank_deficient=rank < len(family),
    )


def frame_bounds(family: VectorFamily) -> BoundsReport:
    """
    Frame bounds of the family as a frame for its span.

    The frame operator is restricted to span(F) by discarding singular
    values below rank_rel * sigma_max, so a family that does not span C^m
    still reports the lower bound on its span. ``rank_deficient`` records
    that the span is a proper subspace.
    """
    U, s, _ = np.linalg.svd(family.matrix, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise SingularOperatorError("frame bounds of an all-zero family", rank=0, expected=family.dim)
    keep = s > get_config().tolerance.rank_rel * s[0]
    rank = int(np.sum(keep))
    eig = s[keep] ** 2
    cert = Certificate(
        lower_value=float(eig[-1]),
        upper_value=float(eig[0]),
        lower_vector=U[:, rank - 1],
        upper_vector=U[:, 0],
    )
    if rank < family.dim:
        logger.debug("family spans a %d-dimensional subspace of C^%d", rank, family.dim)
    return BoundsReport(
        lower=float(eig[-1]),
        upper=float(eig[0]),
        kind=BoundsKind.FRAME,
        certificate=cert,
        rank=rank,
        rank_deficient=rank < family.dim,
    )


def bessel_bound(family: VectorFamily) -> float:
    """Optimal Bessel bound: squared largest singular value of the synthesis matrix"""
    if len(family) == 0:
        return 0.0
    s = np.linalg.svd(family.matrix, compute_uv=False)
    return float(s[0] ** 2)


def quadratic_form(family: VectorFamily, coefficients: np.ndarray) -> float:
    """||Sum a_i f_i||^2"""
    v = family.matrix @ np.asarray(coefficients, dtype=np.complex128)
    return float(np.real(np.vdot(v, v)))


def is_tight(report: BoundsReport, rtol: float = 1e-6) -> bool:
    return abs(report.upper - report.lower) <= rtol * max(report.upper, 1e-300)
