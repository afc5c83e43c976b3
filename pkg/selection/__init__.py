"""
Selection Module

Restricted invertibility: finite subset selection with certified lower
Riesz bounds, reference curves, derived blockwise parameters and the
blockwise selectors for localized systems.
"""
from .curves import (
    BarrierCurve,
    ConstantCurve,
    PowerCurve,
    ReferenceCurve,
    SmoothedCurve,
    StepCurve,
    TabulatedCurve,
    make_curve,
    smooth_c_curve,
)
from .strategies import (
    BarrierStrategy,
    ExhaustiveStrategy,
    GreedyStrategy,
    SelectionStrategy,
    StrategyOutcome,
    StrategyRegistry,
    get_strategy,
    pareto_frontier,
    registry,
)
from .result import BlockRecord, SelectionResult
from .selector import SelectorConfig, exact_bounds, finite_rit_select, normalize_columns, required_size
from .parameters import DerivedParameters, InequalityRecord, derive_parameters
from .cross_terms import cross_term_actual, cross_term_bound, cross_term_ratio
from .blockwise import block_centers, blockwise_select_caseA, blockwise_select_caseB
from .verify import ClauseCheck, VerificationReport, verify_conclusions

__all__ = [
    "BarrierCurve",
    "ConstantCurve",
    "PowerCurve",
    "ReferenceCurve",
    "SmoothedCurve",
    "StepCurve",
    "TabulatedCurve",
    "make_curve",
    "smooth_c_curve",
    "BarrierStrategy",
    "ExhaustiveStrategy",
    "GreedyStrategy",
    "SelectionStrategy",
    "StrategyOutcome",
    "StrategyRegistry",
    "get_strategy",
    "pareto_frontier",
    "registry",
    "BlockRecord",
    "SelectionResult",
    "SelectorConfig",
    "exact_bounds",
    "finite_rit_select",
    "normalize_columns",
    "required_size",
    "DerivedParameters",
    "InequalityRecord",
    "derive_parameters",
    "cross_term_actual",
    "cross_term_bound",
    "cross_term_ratio",
    "block_centers",
    "blockwise_select_caseA",
    "blockwise_select_caseB",
    "ClauseCheck",
    "VerificationReport",
    "verify_conclusions",
]
