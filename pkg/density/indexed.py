"""
Indexed Density

D^-(a;J) and D^+(a;J): the liminf/limsup over R of
inf_k / sup_k |a^-1(B_R(k)) ∩ J| / |B_R(0)|.

Exact mode reads the periodic structure of a(J) off the window; sweep mode
counts boxes for every admissible center at each radius.
"""
import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from errors import DensityError
from .estimate import DensityEstimate, exact_estimate, extrapolate_sweep
from .familymap import IndexedFamilyMap
from .group import FgaGroup
from .pattern import pattern_from_map

logger = logging.getLogger(__name__)


class DensityMode(Enum):
    EXACT_PATTERN = "exact_pattern"
    SWEEP = "sweep"


def _window_sum(arr: np.ndarray, axis: int, width: int) -> np.ndarray:
    """Sums over every run of ``width`` consecutive entries along ``axis``"""
    n = arr.shape[axis]
    c = np.cumsum(arr, axis=axis)
    zero = np.zeros_like(np.take(c, [0], axis=axis))
    c = np.concatenate([zero, c], axis=axis)
    return np.take(c, np.arange(width, n + 1), axis=axis) - np.take(c, np.arange(0, n + 1 - width), axis=axis)


def count_grid(group: FgaGroup, points: np.ndarray, lows: Sequence[int], highs: Sequence[int]) -> np.ndarray:
    """
    Multiplicity array over a rectangular free region times the full torsion part.

    Points outside the region are ignored.
    """
    d1 = group.free_rank
    lows = np.asarray(lows, dtype=np.int64)
    highs = np.asarray(highs, dtype=np.int64)
    shape = [int(h - l + 1) for l, h in zip(lows, highs)] + list(group.cyclic_moduli)
    grid = np.zeros(shape, dtype=np.int64)
    if points.size == 0:
        return grid
    pts = group.reduce_array(points)
    inside = np.all((pts[:, :d1] >= lows) & (pts[:, :d1] <= highs), axis=1) if d1 else np.ones(len(pts), bool)
    idx = pts[inside].copy()
    idx[:, :d1] -= lows
    np.add.at(grid, tuple(idx.T), 1)
    return grid


def box_sums(grid: np.ndarray, group: FgaGroup, radius: int) -> np.ndarray:
    """
    Counts in B_R(k) for every center k whose box stays inside the grid.

    Free axes shrink by 2R (only fully contained boxes); cyclic axes wrap.
    Returns an empty array when no box fits.
    """
    side = 2 * radius + 1
    out = grid
    for axis in range(group.free_rank):
        if out.shape[axis] < side:
            return np.zeros((0,), dtype=grid.dtype)
        out = _window_sum(out, axis, side)
    for j, n in enumerate(group.cyclic_moduli):
        axis = group.free_rank + j
        if side >= n:
            out = out.sum(axis=axis, keepdims=True)
        elif radius > 0:
            padded = np.take(out, np.arange(-radius, n + radius), axis=axis, mode="wrap")
            out = _window_sum(padded, axis, side)
    return out


def box_count_range(
    fmap: IndexedFamilyMap,
    radius: int,
    subset: Optional[Iterable[Any]] = None,
    region: Optional[Sequence[Tuple[int, int]]] = None,
) -> Tuple[float, float]:
    """(inf_k, sup_k) of |a^-1(B_R(k)) ∩ J| / |B_R| over centers with boxes inside the region"""
    group = fmap.group
    lows, highs = _region(fmap, region)
    grid = count_grid(group, fmap.points_of(subset), lows, highs)
    sums = box_sums(grid, group, radius)
    if sums.size == 0:
        raise DensityError(f"no box of radius {radius} fits the window")
    vol = group.box_size(radius)
    return float(sums.min()) / vol, float(sums.max()) / vol


def _region(fmap: IndexedFamilyMap, region: Optional[Sequence[Tuple[int, int]]]) -> Tuple[np.ndarray, np.ndarray]:
    if fmap.group.free_rank == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    if region is not None:
        lows = np.array([lo for lo, _ in region], dtype=np.int64)
        highs = np.array([hi for _, hi in region], dtype=np.int64)
        return lows, highs
    if len(fmap) == 0:
        raise DensityError("cannot infer a window from an empty map")
    return fmap.free_extent()


def density_sweep(
    fmap: IndexedFamilyMap,
    subset: Optional[Iterable[Any]] = None,
    radii: Optional[Sequence[int]] = None,
    r_max: int = 32,
    region: Optional[Sequence[Tuple[int, int]]] = None,
) -> DensityEstimate:
    """
    Box-count sweep over radii with 1/R extrapolation of the inf and sup curves.

    Candidate centers are the window eroded by R, so only boxes that lie
    entirely inside the rendered window are counted.
    """
    group = fmap.group
    cfg = get_config().density
    lows, highs = _region(fmap, region)
    subset = list(subset) if subset is not None else None
    grid = count_grid(group, fmap.points_of(subset), lows, highs)
    radii = list(radii) if radii is not None else list(range(1, r_max + 1))

    sweep: List[Tuple[int, float, float]] = []
    for R in radii:
        sums = box_sums(grid, group, R)
        if sums.size == 0:
            logger.debug("radius %d exceeds the window, sweep stops", R)
            break
        vol = group.box_size(R)
        sweep.append((int(R), float(sums.min()) / vol, float(sums.max()) / vol))

    if group.is_finite:
        # boxes saturate once they cover the group; the last value is exact
        total = len(subset) if subset is not None else len(fmap)
        value = Fraction(total, group.order)
        return DensityEstimate(lower=value, upper=value, exact=True, sweep=sweep)

    lower, upper, info = extrapolate_sweep(sweep, cfg.extrapolation_tail)
    return DensityEstimate(lower=lower, upper=upper, exact=False, sweep=sweep, extrapolation=info)


def density_indexed(
    fmap: IndexedFamilyMap,
    subset: Optional[Iterable[Any]] = None,
    mode: str = "exact_pattern",
    r_max: int = 32,
    period: Optional[Sequence[int]] = None,
    region: Optional[Sequence[Tuple[int, int]]] = None,
) -> DensityEstimate:
    """
    Lower and upper density of J (default: the whole index set) under a.

    ``exact_pattern`` requires a(J) to be periodic on the window and returns
    exact rationals; ``sweep`` returns the finite-R sequence and extrapolated
    limits.
    """
    mode = DensityMode(mode)
    subset = list(subset) if subset is not None else None
    if subset is not None and not subset:
        return exact_estimate(Fraction(0))
    if mode is DensityMode.EXACT_PATTERN:
        pattern = pattern_from_map(fmap, subset, period)
        est = exact_estimate(pattern.density())
        logger.debug("exact density %s with period %s", est.lower, pattern.period)
        return est
    return density_sweep(fmap, subset, r_max=r_max, region=region)


def density_ratio(
    fmap: IndexedFamilyMap,
    subset: Iterable[Any],
    period: Optional[Sequence[int]] = None,
) -> Fraction:
    """D^-(a;J) / D^-(a;I) in exact arithmetic"""
    num = density_indexed(fmap, subset, period=period).lower
    den = density_indexed(fmap, None, period=period).lower
    if den == 0:
        raise DensityError("index set has zero density")
    return Fraction(num) / Fraction(den)
