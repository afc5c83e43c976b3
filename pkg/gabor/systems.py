"""
Gabor systems {pi(lam) phi : lam in Lambda} as vector families, the
canonical tight window of a lattice system and the half-lattice reference.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config import get_config
from density.group import FgaGroup
from errors import DimensionMismatchError, GaborError
from frames.family import VectorFamily
from .signal import Signal, TFSet, gaussian

logger = logging.getLogger(__name__)


def _columns(phi: Signal, points: np.ndarray) -> np.ndarray:
    n = phi.n
    k = np.arange(n)
    x, w = points[:, 0], points[:, 1]
    rolled = phi.samples[(k[:, None] - x[None, :]) % n]
    return rolled * np.exp(2j * np.pi * np.outer(k, w) / n)


def gabor_system(phi: Signal, Lambda: TFSet) -> VectorFamily:
    """Columns M_w T_x phi labelled (x, w), in the order of ``Lambda``"""
    if Lambda.n != phi.n:
        raise DimensionMismatchError(f"window has n = {phi.n}, TF set lives on n = {Lambda.n}")
    if len(Lambda) == 0:
        raise GaborError("empty time-frequency set")
    pts = Lambda.as_array()
    return VectorFamily(_columns(phi, pts), tuple((int(x), int(w)) for x, w in pts))


def gabor_system_union(windows: Sequence[Signal], Lambdas: Sequence[TFSet]) -> VectorFamily:
    """Labelled union of (phi_j, Lambda_j); labels (j, x, w)"""
    if len(windows) != len(Lambdas) or not windows:
        raise GaborError("need one TF set per window")
    blocks = []
    labels: List[Tuple[int, int, int]] = []
    for j, (phi, Lam) in enumerate(zip(windows, Lambdas)):
        fam = gabor_system(phi, Lam)
        blocks.append(fam.matrix)
        labels.extend((j, x, w) for x, w in fam.labels)
    return VectorFamily(np.hstack(blocks), tuple(labels))


def frame_operator_matrix(phi: Signal, Lambda: TFSet) -> np.ndarray:
    M = gabor_system(phi, Lambda).matrix
    return M @ M.conj().T


def canonical_tight_window(g: Signal, a: int, b: int) -> Signal:
    """S^{-1/2} g for the lattice system (g, a Z_n x b Z_n); its system is Parseval"""
    S = frame_operator_matrix(g, TFSet.lattice(g.n, a, b))
    values, vectors = linalg.eigh(S)
    if values[0] <= get_config().tolerance.eig_rel * values[-1]:
        raise GaborError(f"lattice ({a}, {b}) does not give a frame for this window (lower bound {values[0]:.3g})")
    root = (vectors / np.sqrt(values)[None, :]) @ vectors.conj().T
    return g.with_samples(root @ g.samples)


def half_lattice_step(n: int, redundancy: Optional[float] = None) -> int:
    """
    Even divisor h of n whose lattice h Z_n x h Z_n has redundancy n / h^2
    closest to the target (ties to the smaller h).
    """
    cfg = get_config().gabor
    if cfg.half_lattice_step:
        return int(cfg.half_lattice_step)
    target = cfg.target_redundancy if redundancy is None else redundancy
    candidates = [h for h in range(2, n + 1, 2) if n % h == 0 and n / (h * h) >= 1]
    if not candidates:
        raise GaborError(f"n = {n} has no even divisor giving a frame lattice")
    return min(candidates, key=lambda h: (abs(n / (h * h) - target), h))


def reference_system(n: int, h: Optional[int] = None, window: Optional[Signal] = None) -> Tuple[VectorFamily, FgaGroup]:
    """
    Parseval Gabor frame on the lattice h Z_n x h Z_n built from the canonical
    tight window of ``window`` (default: the Gaussian), labelled by its index
    (x / h, w / h) in Z_{n/h} x Z_{n/h}.
    """
    h = half_lattice_step(n) if h is None else int(h)
    if n % h:
        raise GaborError(f"half-lattice step {h} does not divide n = {n}")
    window = gaussian(n) if window is None else window
    tight = canonical_tight_window(window, h, h)
    lattice = TFSet.lattice(n, h, h)
    family = gabor_system(tight, lattice)
    family = family.relabel([(x // h, w // h) for x, w in family.labels])
    group = FgaGroup.cyclic(n // h, n // h)
    logger.debug("reference system: n = %d, h = %d, %d elements", n, h, len(family))
    return family, group
