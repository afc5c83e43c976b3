"""
Relations between localization maps: fiber bounds and bounded differences.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from errors import DensityError
from .familymap import IndexedFamilyMap
from .indexed import density_indexed

logger = logging.getLogger(__name__)


def fiber_bound(fmap: IndexedFamilyMap) -> int:
    """K = max_k |a^-1(k)| over the window"""
    if len(fmap) == 0:
        return 0
    _, counts = np.unique(fmap.points, axis=0, return_counts=True)
    return int(counts.max())


@dataclass
class MapEquivalenceReport:
    bounded_difference: bool
    sup_difference: int
    growth: bool
    densities: Dict[str, Any] = field(default_factory=dict)
    densities_match: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bounded_difference": self.bounded_difference,
            "sup_difference": self.sup_difference,
            "growth": self.growth,
            "densities": self.densities,
            "densities_match": self.densities_match,
        }


def map_equivalence(
    a: IndexedFamilyMap,
    b: IndexedFamilyMap,
    subset: Optional[Iterable[Any]] = None,
    period: Optional[Sequence[int]] = None,
    compare_densities: bool = True,
) -> MapEquivalenceReport:
    """
    Compare two maps on a common index set.

    Reports sup_i ||a(i) - b(i)||_inf. Boundedness cannot be decided on a
    window, so it is judged by nested windows: labels are ordered by
    ||a(i)||, and growth is flagged when the sup over the full window exceeds
    the sup over its inner half. When ``compare_densities`` is set, exact
    densities of a(I), b(I) (and a(J), b(J) for a subset) are compared.
    """
    if a.group != b.group:
        raise DensityError("maps land in different groups")
    if set(a.labels) != set(b.labels):
        raise DensityError("maps are defined on different index sets")

    labels = list(a.labels)
    pa = a.points_of(labels)
    pb = b.points_of(labels)
    diff = a.group.distance(pa, pb)
    sup_all = int(diff.max()) if diff.size else 0

    order = np.argsort(a.group.norm(pa), kind="stable")
    half = order[: max(1, len(order) // 2)]
    sup_half = int(diff[half].max()) if diff.size else 0
    growth = sup_all > sup_half

    report = MapEquivalenceReport(bounded_difference=not growth, sup_difference=sup_all, growth=growth)
    if compare_densities:
        sets = {"I": None}
        if subset is not None:
            sets["J"] = list(subset)
        match = True
        for name, sel in sets.items():
            da = density_indexed(a, sel, period=period).lower
            db = density_indexed(b, sel, period=period).lower
            report.densities[name] = {"a": str(da), "b": str(db)}
            match = match and da == db
        report.densities_match = match
    logger.debug("map comparison: sup %d (inner half %d), growth=%s", sup_all, sup_half, growth)
    return report
