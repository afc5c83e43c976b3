"""
Frame Operators

Analysis, synthesis and frame operators, canonical duals and operator norms.
"""
import logging
from typing import Optional

import numpy as np

from config import get_config
from errors import DimensionMismatchError, SingularOperatorError
from .family import VectorFamily

logger = logging.getLogger(__name__)


def analysis(family: VectorFamily, f: np.ndarray) -> np.ndarray:
    """Coefficients <f, f_i> (inner product linear in the first argument)"""
    f = np.asarray(f, dtype=np.complex128)
    if f.shape[0] != family.dim:
        raise DimensionMismatchError(f"vector of length {f.shape[0]} for ambient dimension {family.dim}")
    return family.matrix.conj().T @ f


def synthesis(family: VectorFamily, coefficients: np.ndarray) -> np.ndarray:
    """Sum_i c_i f_i"""
    coefficients = np.asarray(coefficients, dtype=np.complex128)
    if coefficients.shape[0] != len(family):
        raise DimensionMismatchError(f"{coefficients.shape[0]} coefficients for {len(family)} vectors")
    return family.matrix @ coefficients


def frame_operator(family: VectorFamily) -> np.ndarray:
    """S f = Sum_i <f, f_i> f_i as an m x m Hermitian matrix"""
    T = family.matrix
    S = T @ T.conj().T
    return (S + S.conj().T) / 2


def spectral_norm(M: np.ndarray, dense_cap: Optional[int] = None, rtol: Optional[float] = None) -> float:
    """
    Largest singular value of M.

    Dense SVD up to ``dense_cap`` rows/columns, power iteration on M^H M above it.
    """
    cfg = get_config()
    dense_cap = cfg.localization.dense_cap if dense_cap is None else dense_cap
    rtol = cfg.tolerance.power_rtol if rtol is None else rtol
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if max(M.shape) <= dense_cap:
        return float(np.linalg.norm(M, 2))
    return _power_norm(M, rtol, cfg.tolerance.power_max_iter)


def _power_norm(M: np.ndarray, rtol: float, max_iter: int) -> float:
    # fixed start vector keeps the estimate reproducible
    x = np.ones(M.shape[1], dtype=np.result_type(M.dtype, np.float64)) / np.sqrt(M.shape[1])
    estimate = 0.0
    for it in range(max_iter):
        y = M.conj().T @ (M @ x)
        ynorm = np.linalg.norm(y)
        if ynorm == 0.0:
            return 0.0
        x = y / ynorm
        new_estimate = float(np.sqrt(ynorm))
        if abs(new_estimate - estimate) <= rtol * new_estimate:
            logger.debug("power iteration converged after %d steps", it + 1)
            return new_estimate
        estimate = new_estimate
    logger.warning("power iteration hit %d steps without reaching rtol %.1e", max_iter, rtol)
    return estimate


def numerical_rank(family: VectorFamily, rank_rel: Optional[float] = None) -> int:
    rank_rel = get_config().tolerance.rank_rel if rank_rel is None else rank_rel
    s = np.linalg.svd(family.matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_rel * s[0]))


def dual_family(family: VectorFamily, within_span: bool = False) -> VectorFamily:
    """
    Canonical dual {S^-1 f_i}.

    If the family does not span its ambient space the frame operator is
    singular; with ``within_span`` the pseudo-inverse is used instead, which is
    the canonical dual of the family as a frame for its span.
    """
    S = frame_operator(family)
    rank = numerical_rank(family)
    if rank == 0:
        raise SingularOperatorError("frame operator of an all-zero family", rank=0, expected=family.dim)
    if rank < family.dim and not within_span:
        raise SingularOperatorError(
            f"frame operator has rank {rank} < ambient dimension {family.dim}",
            rank=rank,
            expected=family.dim,
        )
    if rank == family.dim:
        dual = np.linalg.solve(S, family.matrix)
    else:
        dual = np.linalg.pinv(S, rcond=get_config().tolerance.rank_rel, hermitian=True) @ family.matrix
    return family.with_matrix(dual)


def reconstruction_residual(family: VectorFamily, dual: VectorFamily, samples: np.ndarray) -> float:
    """
    Largest relative residual ||f - Sum <f, f_i> g_i|| / ||f|| over sample columns.
    """
    if dual.dim != family.dim or len(dual) != len(family):
        raise DimensionMismatchError("family and dual must have the same shape")
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.ndim == 1:
        samples = samples.reshape(-1, 1)
    rebuilt = dual.matrix @ (family.matrix.conj().T @ samples)
    norms = np.linalg.norm(samples, axis=0)
    norms[norms == 0] = 1.0
    return float(np.max(np.linalg.norm(samples - rebuilt, axis=0) / norms))


def dual_pair_residual(family: VectorFamily, dual: VectorFamily) -> float:
    """||G~ G^H - I||: zero exactly when the pair reconstructs every vector"""
    if dual.dim != family.dim or len(dual) != len(family):
        raise DimensionMismatchError("family and dual must have the same shape")
    R = dual.matrix @ family.matrix.conj().T
    return float(np.linalg.norm(R - np.eye(family.dim), 2))
