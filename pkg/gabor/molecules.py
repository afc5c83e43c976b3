"""
Gabor molecules: families whose STFT moduli, recentred at their TF
centers, share one envelope Gamma on the TF grid.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from errors import DimensionMismatchError, GaborError
from frames.family import VectorFamily
from .signal import Signal, TFPoint, TFSet, gaussian
from .stft import stft
from .systems import gabor_system

logger = logging.getLogger(__name__)


@dataclass
class MoleculeSystem:
    elements: VectorFamily
    tf_centers: List[TFPoint]
    envelope_gamma: np.ndarray  # indexed by offset (y - x, xi - w) mod n

    def __post_init__(self):
        n = self.elements.dim
        if len(self.tf_centers) != len(self.elements):
            raise DimensionMismatchError(f"{len(self.tf_centers)} centers for {len(self.elements)} molecules")
        gamma = np.asarray(self.envelope_gamma, dtype=float)
        if gamma.shape != (n, n):
            raise DimensionMismatchError(f"envelope must be defined on the full {n} x {n} grid, got {gamma.shape}")
        if np.any(gamma < 0):
            raise GaborError("envelope values must be nonnegative")
        self.envelope_gamma = gamma
        self.tf_centers = [c if isinstance(c, TFPoint) else TFPoint(*c) for c in self.tf_centers]

    @property
    def n(self) -> int:
        return self.elements.dim


@dataclass
class MoleculeReport:
    max_violation: float
    violations: int
    worst_label: Any
    worst_offset: tuple
    minimal_envelope: np.ndarray
    tolerance: float

    @property
    def valid(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_violation": self.max_violation,
            "violations": self.violations,
            "worst_label": list(self.worst_label) if isinstance(self.worst_label, tuple) else self.worst_label,
            "worst_offset": list(self.worst_offset),
            "valid": self.valid,
            "tolerance": self.tolerance,
            "minimal_envelope_total": float(self.minimal_envelope.sum()),
        }


def recentered_moduli(ms: MoleculeSystem, g0: Signal) -> np.ndarray:
    """|V_{g0} f_j| shifted so that each molecule's center sits at the origin; shape (N, n, n)"""
    out = np.empty((len(ms.elements), ms.n, ms.n))
    for j, (vec, c) in enumerate(zip(ms.elements.vectors, ms.tf_centers)):
        V = np.abs(stft(g0.with_samples(vec), g0))
        out[j] = np.roll(V, (-c.x, -c.omega), axis=(0, 1))
    return out


def molecule_check(ms: MoleculeSystem, g0: Optional[Signal] = None, rtol: float = 1e-9) -> MoleculeReport:
    """Check |V_{g0} f_j(y, xi)| <= Gamma(y - x_j, xi - w_j) for every element"""
    g0 = gaussian(ms.n) if g0 is None else g0
    moduli = recentered_moduli(ms, g0)
    minimal = moduli.max(axis=0)
    tol = rtol * max(float(minimal.max()), 1.0)
    excess = moduli - ms.envelope_gamma[None, :, :]
    worst = np.unravel_index(int(np.argmax(excess)), excess.shape)
    max_violation = max(float(excess[worst]), 0.0)
    bad = int(np.sum(np.any(excess > tol, axis=(1, 2))))
    if bad:
        logger.info("%d of %d molecules exceed the envelope (max excess %.3g)", bad, len(ms.elements), max_violation)
    return MoleculeReport(
        max_violation=max_violation,
        violations=bad,
        worst_label=ms.elements.labels[worst[0]],
        worst_offset=(int(worst[1]), int(worst[2])),
        minimal_envelope=minimal,
        tolerance=tol,
    )


def molecules_from_shifts(phi: Signal, Lambda: TFSet, g0: Optional[Signal] = None,
                          gamma: Optional[np.ndarray] = None) -> MoleculeSystem:
    """Exact TF shifts of phi; the default envelope is |V_{g0} phi|"""
    g0 = gaussian(phi.n, phi.grid_spacing) if g0 is None else g0
    gamma = np.abs(stft(phi, g0)) if gamma is None else gamma
    return MoleculeSystem(gabor_system(phi, Lambda), list(Lambda.points), gamma)
