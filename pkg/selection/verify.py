"""
Conclusion Re-checks

Recomputes the guarantees of a selection result without trusting the
selector's bookkeeping:

- size: the density of J relative to the index set (blockwise results) or
  |J| / n (finite results);
- lower Riesz bound: lambda_min of Gram(F_J) by a fresh eigendecomposition,
  against c(eps')(1 - delta/2)(A/B)u^2 for blockwise results;
- cross-term ratio below delta/8 for results built on a tight frame.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy import linalg

from density.indexed import density_indexed
from errors import DensityError
from .result import SelectionResult

logger = logging.getLogger(__name__)

WINDOW_TOLERANCE = 0.05


@dataclass
class ClauseCheck:
    name: str
    measured: float
    threshold: float
    tolerance: float = 0.0
    detail: Dict[str, Any] = field(default_factory=dict)
    relation: str = "ge"

    @property
    def passed(self) -> bool:
        if self.relation == "le":
            return bool(self.measured <= self.threshold + self.tolerance + 1e-12)
        return bool(self.measured >= self.threshold - self.tolerance - 1e-12)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "measured": self.measured,
            "threshold": self.threshold,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    clauses: List[ClauseCheck]
    specialization: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseCheck:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "specialization": self.specialization,
            "clauses": [c.to_dict() for c in self.clauses],
        }


def _recomputed_lambda_min(result: SelectionResult) -> float:
    if result.source is None:
        raise ValueError("result carries no source family; cannot re-verify")
    if not result.selected:
        return 0.0
    # duplicates in J are kept as repeated columns
    positions = [result.source.index_of(l) for l in result.selected]
    X = result.source.matrix[:, positions]
    eig = linalg.eigh(X.conj().T @ X, eigvals_only=True)
    return float(eig[0])


def _lower_density(fmap, subset=None) -> float:
    try:
        return float(density_indexed(fmap, subset).lower)
    except DensityError:
        return float(density_indexed(fmap, subset, mode="sweep").lower)


def _blockwise_density(result: SelectionResult) -> Dict[str, float]:
    """Count J inside the trimmed block boxes and divide by the cells they own"""
    fmap = result.family_map
    params = result.params
    group = fmap.group
    centers = np.asarray([b.center for b in result.per_block], dtype=np.int64).reshape(-1, group.rank)
    unique = list(dict.fromkeys(result.selected))
    points = fmap.points_of(unique)
    covers = group.is_finite and group.box_size(params.P) == group.order
    radius = params.P if covers else params.P - params.Q
    inside = np.zeros(len(unique), dtype=bool)
    for k in centers:
        inside |= group.distance(points, k[None, :]) <= radius
    volume = float(len(centers) * params.spacing ** group.free_rank)
    for n in group.cyclic_moduli:
        volume *= n / max(1, n // params.spacing)
    counted = int(inside.sum())
    D_minus = _lower_density(fmap)
    density_J = counted / volume if volume > 0 else 0.0
    return {
        "counted": counted,
        "cell_volume": volume,
        "density_J": density_J,
        "D_minus": D_minus,
        "ratio": density_J / D_minus if D_minus > 0 else 0.0,
    }


def verify_conclusions(
    result: SelectionResult,
    u: Optional[float] = None,
    B_F: Optional[float] = None,
    epsilon: Optional[float] = None,
    delta: Optional[float] = None,
    A: Optional[float] = None,
    B: Optional[float] = None,
) -> VerificationReport:
    """
    Re-check the size and lower-bound conclusions of ``result``.

    Defaults come from the result itself: u and ||T|| as recorded, B_F = ||T||^2,
    A and B from the recorded chain (1 for finite results). Blockwise size
    ratios are measured on a window and get a tolerance of 0.05.
    """
    u = result.u if u is None else float(u)
    B_F = result.T_norm ** 2 if B_F is None else float(B_F)
    epsilon = result.epsilon if epsilon is None else float(epsilon)
    delta = (result.delta if result.delta is not None else 0.0) if delta is None else float(delta)
    A = float(result.chain.get("A", 1.0)) if A is None else float(A)
    B = float(result.chain.get("B", 1.0)) if B is None else float(B)

    size_target = (1 - epsilon) * u * u / B_F
    if result.blockwise and result.family_map is not None:
        info = _blockwise_density(result)
        duplicates = len(result.selected) - len(set(result.selected))
        info["duplicates"] = duplicates
        size = ClauseCheck("density", info["ratio"], size_target, WINDOW_TOLERANCE, info)
        lam_threshold = result.required_c * (1 - delta / 2) * (A / B) * u * u
    else:
        n = len(result.source) if result.source is not None else 0
        measured = len(set(result.selected)) / n if n else 0.0
        size = ClauseCheck("density", measured, size_target, detail={"size": result.size, "n": n})
        lam_threshold = result.certified_c * u * u

    lam = _recomputed_lambda_min(result)
    riesz = ClauseCheck(
        "lower_riesz",
        lam,
        lam_threshold,
        detail={
            "recorded": result.achieved_lower,
            "agrees": bool(abs(lam - result.achieved_lower) <= 1e-9 * max(1.0, abs(lam))),
        },
    )
    # a zero lambda_min never certifies anything
    if lam <= 1e-12:
        riesz.threshold = max(riesz.threshold, 1e-9)

    specialization = None
    if abs(A - 1) < 1e-12 and abs(B - 1) < 1e-12 and abs(u - 1) < 1e-12:
        specialization = f"density(J) >= (1 - eps) / ||T||^2 = {(1 - epsilon) / B_F:.6g}"

    clauses = [size, riesz]
    if "cross_ratio" in result.chain:
        clauses.append(ClauseCheck("cross_ratio", float(result.chain["cross_ratio"]), delta / 8, relation="le",
                                   detail={"spacing": result.params.spacing if result.params else None}))
    report = VerificationReport(clauses, specialization)
    dup = Counter(result.selected)
    if any(c > 1 for c in dup.values()):
        logger.warning("selected set repeats %d labels", sum(1 for c in dup.values() if c > 1))
    logger.info("verification: density %s (%.4g vs %.4g), lower bound %s (%.4g vs %.4g)",
                "pass" if size.passed else "FAIL", size.measured, size.threshold,
                "pass" if riesz.passed else "FAIL", riesz.measured, riesz.threshold)
    return report
