"""
Index-free Density

Density of a family F measured against a reference family G = {g_n}
indexed by group points, without any localization map:

    value(R) = sum_f a_f sum_{n in B_R(k)} |<f, g_{n-k}>|^2 / |B_R(0)|,
    a_f = (sum_n |<f, g_n>|^2)^-1

Substituting m = n - k shows the value does not depend on k, so the sweep
is a single curve. The formula is evaluated as written.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from errors import DensityError
from frames.family import VectorFamily, label_points
from .estimate import DensityEstimate, extrapolate_sweep
from .familymap import IndexedFamilyMap
from .group import FgaGroup
from .indexed import density_sweep

logger = logging.getLogger(__name__)


def coefficient_matrix(family: VectorFamily, reference: VectorFamily) -> np.ndarray:
    """C[f, n] = <f, g_n>"""
    if family.dim != reference.dim:
        raise DensityError(f"ambient dimensions differ: {family.dim} vs {reference.dim}")
    return family.matrix.T @ reference.matrix.conj()


def reference_group(reference: VectorFamily, group: Optional[FgaGroup] = None) -> FgaGroup:
    if group is not None:
        return group
    return FgaGroup.integers(label_points(reference).shape[1])


def assign_centers(magnitudes: np.ndarray, positions: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """
    Row-wise argmax of |<f, g_n>| with ties broken toward the
    lexicographically smallest group point. Returns row indices into positions.
    """
    order = np.lexsort(positions.T[::-1])  # lexicographic order of points
    ranked = magnitudes[:, order]
    peak = ranked.max(axis=1, keepdims=True)
    if np.any(peak <= 0):
        bad = int(np.argmax(peak.ravel() <= 0))
        raise DensityError(f"family member {bad} has no nonzero coefficient against the reference")
    hits = ranked >= peak * (1 - rtol)
    return order[np.argmax(hits, axis=1)]


@dataclass
class _Energy:
    weights: np.ndarray  # w_n = sum_f a_f |c_{f,n}|^2
    per_member: np.ndarray  # a_f |c_{f,n}|^2, shape (|F|, |G|)
    norms: np.ndarray  # ||n||_inf for each reference index


def _energy(family: VectorFamily, reference: VectorFamily, group: FgaGroup) -> _Energy:
    C2 = np.abs(coefficient_matrix(family, reference)) ** 2
    energy = C2.sum(axis=1)
    zero = energy <= get_config().tolerance.zero
    if np.any(zero):
        raise DensityError(f"{int(zero.sum())} family members have zero energy against the reference window")
    a = 1.0 / energy
    per_member = C2 * a[:, None]
    norms = group.norm(label_points(reference))
    return _Energy(weights=per_member.sum(axis=0), per_member=per_member, norms=norms)


def _value(weights: np.ndarray, norms: np.ndarray, radius: int, group: FgaGroup) -> float:
    return float(weights[norms <= radius].sum()) / group.box_size(radius)


def density_index_free(
    family: VectorFamily,
    reference: VectorFamily,
    r_max: int = 64,
    radii: Optional[Sequence[int]] = None,
    group: Optional[FgaGroup] = None,
) -> DensityEstimate:
    """
    Index-free lower/upper density of ``family`` with respect to ``reference``.

    Reference labels are group points. Besides the radius sweep, an admission
    sweep evaluates the value at a fixed radius as family members are added
    in order of their distance from the origin; steady growth past the
    configured ceiling marks the density as diverging (+inf).
    """
    group = reference_group(reference, group)
    cfg = get_config().density
    en = _energy(family, reference, group)
    radii = list(radii) if radii is not None else list(range(1, r_max + 1))
    window = int(en.norms.max()) if en.norms.size else 0

    sweep = []
    for R in radii:
        if R > window:
            break
        v = _value(en.weights, en.norms, R, group)
        sweep.append((int(R), v, v))

    admission, diverging = _admission_sweep(family, reference, en, group, max(1, max(radii) // 4))
    if diverging:
        logger.info("index-free density diverges: %s", admission[-3:])
        return DensityEstimate(
            lower=float("inf"), upper=float("inf"), exact=False, sweep=sweep,
            diverging=True, admission=admission,
        )

    lower, upper, info = extrapolate_sweep(sweep, cfg.extrapolation_tail)
    return DensityEstimate(lower=lower, upper=upper, exact=False, sweep=sweep, extrapolation=info, admission=admission)


def _admission_sweep(
    family: VectorFamily,
    reference: VectorFamily,
    en: _Energy,
    group: FgaGroup,
    radius: int,
    checkpoints: int = 8,
) -> Tuple[List[Tuple[int, float]], bool]:
    cfg = get_config().density
    positions = label_points(reference)
    centers = positions[assign_centers(np.sqrt(en.per_member), positions)]
    order = np.argsort(group.norm(centers), kind="stable")
    inside = en.norms <= radius
    contribution = en.per_member[order][:, inside].sum(axis=1)
    cumulative = np.cumsum(contribution) / group.box_size(radius)

    n = len(family)
    counts = sorted({max(1, (n * j) // checkpoints) for j in range(1, checkpoints + 1)})
    admission = [(c, float(cumulative[c - 1])) for c in counts]
    values = [v for _, v in admission]
    if len(values) < 3:
        return admission, False
    growing = all(b > a * (1 + 1e-12) for a, b in zip(values, values[1:]))
    half = dict(admission).get(counts[len(counts) // 2 - 1], values[0])
    final = values[-1]
    diverging = growing and final >= cfg.divergence_growth * half and final > cfg.divergence_ceiling
    return admission, diverging


@dataclass
class RelativeDensity:
    r_minus: float
    r_plus: float
    uniform: bool
    sub: DensityEstimate
    parent: DensityEstimate

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r_minus": self.r_minus,
            "r_plus": self.r_plus,
            "uniform": self.uniform,
            "sub": self.sub.to_dict(),
            "parent": self.parent.to_dict(),
        }


def relative_density(
    sub: VectorFamily,
    parent: VectorFamily,
    reference: VectorFamily,
    r_max: int = 64,
    group: Optional[FgaGroup] = None,
    tol: float = 1e-6,
) -> RelativeDensity:
    """R^- = D^-(F')/D^+(F), R^+ = D^+(F')/D^-(F)"""
    d_sub = density_index_free(sub, reference, r_max=r_max, group=group)
    d_par = density_index_free(parent, reference, r_max=r_max, group=group)
    if d_par.diverging or float(d_par.lower) <= 0 or float(d_par.upper) <= 0:
        raise DensityError("parent family has zero or diverging index-free density")
    r_minus = float(d_sub.lower) / float(d_par.upper)
    r_plus = float(d_sub.upper) / float(d_par.lower)
    return RelativeDensity(r_minus, r_plus, abs(r_plus - r_minus) <= tol, d_sub, d_par)


def index_free_agreement(
    family: VectorFamily,
    fmap: IndexedFamilyMap,
    reference: VectorFamily,
    r_max: int = 32,
    subset: Optional[Iterable[Any]] = None,
) -> Dict[str, Any]:
    """
    Indexed density of J under a next to the index-free density of F_J,
    for localized Bessel families where the two are expected to agree.
    """
    subset = list(subset) if subset is not None else list(family.labels)
    indexed = density_sweep(fmap, subset, r_max=r_max)
    free = density_index_free(family.subfamily(subset), reference, r_max=r_max, group=fmap.group)
    gap = max(abs(float(indexed.lower) - float(free.lower)), abs(float(indexed.upper) - float(free.upper)))
    return {"indexed": indexed.to_dict(), "index_free": free.to_dict(), "difference": gap}
