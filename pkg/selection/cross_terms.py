"""
Cross terms between separated blocks.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg

from localization.envelope import Envelope

logger = logging.getLogger(__name__)


def cross_term_actual(blocks: Sequence[np.ndarray]) -> float:
    """|sum_{k != k'} <x_k, x_k'>|"""
    if len(blocks) < 2:
        return 0.0
    X = np.column_stack([np.asarray(x, dtype=np.complex128) for x in blocks])
    total = X.sum(axis=1)
    diag = float(np.sum(np.abs(X) ** 2))
    return abs(float(np.real(np.vdot(total, total))) - diag)


def cross_term_bound(
    blocks: Sequence[np.ndarray],
    dual_envelope: Envelope,
    R_prime: int,
    K: int,
    Q: int,
    B_prime: float,
    c_val: float,
    u: float,
    T_norm: float,
    dim: int = 1,
) -> Tuple[float, float]:
    """
    (bound, actual) for the off-diagonal block interactions.

    bound = (||T||^2 B' / (c u^2)) K (2Q+1)^{2d} (sum ||x_k||^2) K Delta_{r'}(R' - 1);
    blocks whose truncated supports are R' apart interact only through dual
    Gram entries at distance >= R'.
    """
    actual = cross_term_actual(blocks)
    energy = float(sum(np.sum(np.abs(np.asarray(x)) ** 2) for x in blocks))
    if len(blocks) < 2:
        return 0.0, actual
    tail = dual_envelope.tail_sum(R_prime - 1)
    bound = (T_norm ** 2 * B_prime / (c_val * u * u)) * K * (2 * Q + 1) ** (2 * dim) * energy * K * tail
    logger.debug("cross terms: actual %.3e, bound %.3e over %d blocks", actual, bound, len(blocks))
    return float(bound), float(actual)


def cross_term_ratio(gram: np.ndarray, groups: List[np.ndarray]) -> Tuple[float, np.ndarray]:
    """
    Largest |v^H O v| / v^H D v, where D is the block diagonal of the Gram
    matrix over ``groups`` (positions) and O the remaining off-diagonal part.

    Returns the ratio and a maximizing coefficient vector.
    """
    n = gram.shape[0]
    D = np.zeros_like(gram)
    for g in groups:
        D[np.ix_(g, g)] = gram[np.ix_(g, g)]
    O = gram - D
    if not np.any(np.abs(O) > 0):
        return 0.0, np.ones(n) / np.sqrt(max(n, 1))
    values, vectors = linalg.eigh((O + O.conj().T) / 2, (D + D.conj().T) / 2)
    j = int(np.argmax(np.abs(values)))
    return float(abs(values[j])), vectors[:, j]
