"""
Density Module

Finitely generated Abelian groups, boxes, localization maps and the
indexed, Beurling, index-free and relative densities.
"""
from .group import Box, FgaGroup, GroupFlattening, GroupPoint, box_points, box_points_array, flatten_group
from .familymap import IndexedFamilyMap
from .estimate import DensityEstimate
from .pattern import PatternSet, pattern_from_map
from .indexed import box_count_range, density_indexed, density_ratio, density_sweep
from .beurling import Lattice, beurling_density
from .index_free import (
    RelativeDensity,
    assign_centers,
    coefficient_matrix,
    density_index_free,
    index_free_agreement,
    relative_density,
)
from .relations import MapEquivalenceReport, fiber_bound, map_equivalence

__all__ = [
    "Box",
    "FgaGroup",
    "GroupFlattening",
    "GroupPoint",
    "box_points",
    "box_points_array",
    "flatten_group",
    "IndexedFamilyMap",
    "DensityEstimate",
    "PatternSet",
    "pattern_from_map",
    "box_count_range",
    "density_indexed",
    "density_ratio",
    "density_sweep",
    "Lattice",
    "beurling_density",
    "RelativeDensity",
    "assign_centers",
    "coefficient_matrix",
    "density_index_free",
    "index_free_agreement",
    "relative_density",
    "MapEquivalenceReport",
    "fiber_bound",
    "map_equivalence",
]
