"""
Fixtures Module

Builders for the worked instances used by the tests and the CLI.
"""
from .catalog import (
    OrderingExample,
    alternating_power_sum,
    basis_matrix,
    doubling_sum_family,
    doubling_sum_map,
    duplicated_basis,
    emit_fixtures,
    even_labels,
    example_maps,
    exotic_index,
    exotic_order,
    geometric_family,
    localized_copies,
    ordering_example,
    planar_position,
    planar_reference,
    planar_row,
    random_unit_family,
    rearranged_index,
    standard_basis,
)

__all__ = [
    "OrderingExample",
    "alternating_power_sum",
    "basis_matrix",
    "doubling_sum_family",
    "doubling_sum_map",
    "duplicated_basis",
    "emit_fixtures",
    "even_labels",
    "example_maps",
    "exotic_index",
    "exotic_order",
    "geometric_family",
    "localized_copies",
    "ordering_example",
    "planar_position",
    "planar_reference",
    "planar_row",
    "random_unit_family",
    "rearranged_index",
    "standard_basis",
]
