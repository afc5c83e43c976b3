"""
Periodic Pattern Sets

A pattern set is periodic in the free coordinates (period p) and arbitrary
in the cyclic coordinates. It is described by the residues it contains in
the fundamental cell [0, p_1) x ... x [0, p_d1) x Z_N1 x ... and an optional
multiplicity per residue, so multisets such as a(I) for a non-injective map
are exactly representable. Densities of pattern sets are exact rationals.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import DensityError
from .familymap import IndexedFamilyMap
from .group import Box, FgaGroup, GroupPoint, box_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PatternSet:
    group: FgaGroup
    period: Tuple[int, ...]
    residues: Tuple[GroupPoint, ...]
    weights: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        period = tuple(int(p) for p in self.period)
        if len(period) != self.group.free_rank or any(p < 1 for p in period):
            raise ValueError(f"period must have {self.group.free_rank} positive entries, got {period}")
        residues = tuple(tuple(int(c) for c in r) for r in self.residues)
        for r in residues:
            if len(r) != self.group.rank:
                raise ValueError(f"residue {r} does not match group rank {self.group.rank}")
            if not self._in_cell(r, period):
                raise ValueError(f"residue {r} lies outside the fundamental cell")
        if len(set(residues)) != len(residues):
            raise ValueError("residues must be distinct; use weights for multiplicities")
        weights = tuple(int(w) for w in self.weights) if self.weights is not None else (1,) * len(residues)
        if len(weights) != len(residues) or any(w < 1 for w in weights):
            raise ValueError("one positive weight per residue")
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "residues", residues)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_lookup", dict(zip(residues, weights)))

    def _in_cell(self, r: GroupPoint, period: Tuple[int, ...]) -> bool:
        d1 = self.group.free_rank
        free_ok = all(0 <= r[j] < period[j] for j in range(d1))
        cyc_ok = all(0 <= r[d1 + j] < n for j, n in enumerate(self.group.cyclic_moduli))
        return free_ok and cyc_ok

    @property
    def cell_volume(self) -> int:
        return prod(self.period) * self.group.torsion_order

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def density(self) -> Fraction:
        """Exact (uniform) density: weighted residue count over cell volume"""
        return Fraction(self.total_weight, self.cell_volume)

    def residue_of(self, point: Sequence[int]) -> GroupPoint:
        point = self.group.reduce(point)
        d1 = self.group.free_rank
        return tuple(point[j] % self.period[j] for j in range(d1)) + point[d1:]

    def multiplicity(self, point: Sequence[int]) -> int:
        return self._lookup.get(self.residue_of(point), 0)

    def contains(self, point: Sequence[int]) -> bool:
        return self.multiplicity(point) > 0

    def points_in_box(self, box: Box) -> List[GroupPoint]:
        """Members inside a box, each repeated by its multiplicity"""
        out = []
        for p in box_points(self.group, box):
            out.extend([p] * self.multiplicity(p))
        return out

    def complement(self) -> "PatternSet":
        if any(w != 1 for w in self.weights):
            raise DensityError("complement of a multiset pattern is undefined")
        cell = self.cell_points()
        rest = tuple(r for r in cell if r not in self._lookup)
        return PatternSet(self.group, self.period, rest)

    def cell_points(self) -> List[GroupPoint]:
        d1 = self.group.free_rank
        axes = [range(p) for p in self.period] + [range(n) for n in self.group.cyclic_moduli]
        return [tuple(int(x) for x in p) for p in np.ndindex(*[len(a) for a in axes])] if axes else [()]

    def refine(self, period: Sequence[int]) -> "PatternSet":
        """The same set described with a period that is a multiple of the current one"""
        period = tuple(int(p) for p in period)
        if any(q % p for q, p in zip(period, self.period)):
            raise ValueError(f"{period} is not a multiple of {self.period}")
        target = PatternSet(self.group, period, ())
        cell = target.cell_points()
        kept = [(r, self.multiplicity(r)) for r in cell if self.multiplicity(r) > 0]
        return PatternSet(self.group, period, tuple(r for r, _ in kept), tuple(w for _, w in kept))

    def issubset(self, other: "PatternSet") -> bool:
        period = tuple(np.lcm(np.array(self.period, dtype=np.int64), np.array(other.period, dtype=np.int64)).tolist())
        mine, theirs = self.refine(period), other.refine(period)
        return all(theirs.multiplicity(r) >= w for r, w in zip(mine.residues, mine.weights))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group.to_dict(),
            "period": list(self.period),
            "residues": [list(r) for r in self.residues],
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PatternSet":
        group = FgaGroup(data["group"]["free_rank"], tuple(data["group"]["cyclic_moduli"]))
        return cls(group, tuple(data["period"]), tuple(tuple(r) for r in data["residues"]), tuple(data.get("weights") or ()) or None)


def _cell_counts(counts: Counter, group: FgaGroup, origin: np.ndarray, period: Tuple[int, ...], cell: List[GroupPoint]) -> Tuple[int, ...]:
    d1 = group.free_rank
    out = []
    for r in cell:
        p = tuple(int(origin[j] + r[j]) for j in range(d1)) + tuple(r[d1:])
        out.append(counts.get(p, 0))
    return tuple(out)


def pattern_from_map(
    fmap: IndexedFamilyMap,
    subset: Optional[Iterable[Any]] = None,
    period: Optional[Sequence[int]] = None,
    max_period: int = 64,
    reach: int = 3,
) -> PatternSet:
    """
    Read off the periodic multiset a(J) from a map rendered on a window.

    Multiplicities are counted on the fundamental cell nearest the middle of
    the window and must repeat on the ``reach`` cells to either side along
    every free axis; otherwise the set is not representable with that period.
    The window must be large enough that every preimage of the inspected
    cells lies in it. Without an explicit ``period`` the smallest common
    period up to ``max_period`` is searched.
    """
    group = fmap.group
    points = fmap.points_of(subset)
    counts = Counter(tuple(int(c) for c in p) for p in points)
    d1 = group.free_rank

    if d1 == 0:
        residues = sorted(counts)
        return PatternSet(group, (), tuple(residues), tuple(counts[r] for r in residues))

    lo, hi = fmap.free_extent()
    candidates = [tuple(int(p) for p in period)] if period is not None else [(p,) * d1 for p in range(1, max_period + 1)]
    for per in candidates:
        per_arr = np.asarray(per, dtype=np.int64)
        mid = (lo + hi) // 2
        origin = (mid // per_arr) * per_arr
        # inspected cells span origin - reach*p .. origin + (reach+1)p - 1 on each axis
        if np.any(origin - reach * per_arr < lo) or np.any(origin + (reach + 1) * per_arr - 1 > hi):
            continue
        cell = PatternSet(group, per, ()).cell_points()
        base = _cell_counts(counts, group, origin, per, cell)
        consistent = True
        for j in range(d1):
            for step in range(1, reach + 1):
                for sign in (-1, 1):
                    shift = np.zeros(d1, dtype=np.int64)
                    shift[j] = sign * step * per[j]
                    if _cell_counts(counts, group, origin + shift, per, cell) != base:
                        consistent = False
                        break
                if not consistent:
                    break
            if not consistent:
                break
        if consistent:
            kept = [(r, c) for r, c in zip(cell, base) if c > 0]
            logger.debug("pattern period %s with %d residues", per, len(kept))
            return PatternSet(group, per, tuple(r for r, _ in kept), tuple(c for _, c in kept))

    raise DensityError(
        f"map image is not periodic with period {period}" if period is not None
        else f"no period up to {max_period} fits the map image on this window"
    )
