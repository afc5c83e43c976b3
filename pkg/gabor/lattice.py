"""
Localization maps from TF sets onto the half-lattice index group.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from density.familymap import IndexedFamilyMap
from density.group import FgaGroup
from density.indexed import density_indexed
from errors import GaborError
from .signal import TFSet
from .systems import half_lattice_step

logger = logging.getLogger(__name__)


def _nearest_index(coords: np.ndarray, n: int, h: int) -> np.ndarray:
    """Nearest multiple of h on Z_n per coordinate, ties to the smaller index"""
    m = n // h
    lo = (coords // h) % m
    hi = (lo + 1) % m
    rem = coords % h
    out = np.where(2 * rem < h, lo, hi)
    return np.where(2 * rem == h, np.minimum(lo, hi), out)


def nearest_lattice_map(Lambda: TFSet, h: Optional[int] = None) -> IndexedFamilyMap:
    """
    a(x, w) = index of the nearest point of h Z_n x h Z_n in sup-norm,
    coordinatewise with ties broken toward the smaller index. The map lands in
    Z_{n/h} x Z_{n/h} and carries the labels of ``gabor_system``.
    """
    n = Lambda.n
    h = half_lattice_step(n) if h is None else int(h)
    if n % h:
        raise GaborError(f"half-lattice step {h} does not divide n = {n}")
    pts = Lambda.as_array()
    idx = np.stack([_nearest_index(pts[:, 0], n, h), _nearest_index(pts[:, 1], n, h)], axis=1)
    group = FgaGroup.cyclic(n // h, n // h)
    labels = tuple((int(x), int(w)) for x, w in pts)
    return IndexedFamilyMap(group, labels, idx)


def union_lattice_map(fmap: IndexedFamilyMap, copies: int) -> IndexedFamilyMap:
    """Map for ``copies`` stacked systems labelled (j, x, w)"""
    labels = tuple((j,) + tuple(l) for j in range(copies) for l in fmap.labels)
    return IndexedFamilyMap(fmap.group, labels, np.tile(fmap.points, (copies, 1)))


def lattice_offset(Lambda: TFSet, fmap: IndexedFamilyMap, h: int) -> int:
    """max_lam ||lam - h a(lam)||_inf on the cyclic grid"""
    n = Lambda.n
    diff = (Lambda.as_array() - h * fmap.points_of([p.as_tuple() for p in Lambda.points]) + n // 2) % n - n // 2
    return int(np.max(np.abs(diff))) if diff.size else 0


def density_relation(Lambda: TFSet, fmap: IndexedFamilyMap, h: int) -> Dict[str, Any]:
    """D(a) on the index group against h^2 D(Lambda) (points per TF cell)"""
    measured = float(density_indexed(fmap).lower)
    expected = h * h * Lambda.density()
    logger.debug("half-lattice density %.6g, expected %.6g", measured, expected)
    return {"map_density": measured, "expected": expected, "agrees": abs(measured - expected) <= 1e-12}
