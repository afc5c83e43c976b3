"""
Error types for the frame toolkit.

Every failure raised by the library derives from FrameToolkitError so the
CLI can map failures to exit codes in one place.
"""
from typing import Any, Dict, List, Optional


class FrameToolkitError(Exception):
    """Base class for all toolkit errors"""
    pass


class DimensionMismatchError(FrameToolkitError):
    """Vectors or matrices with incompatible shapes were combined."""
    pass


class SingularOperatorError(FrameToolkitError):
    """
    A frame operator is singular on the space where it must be inverted.

    Holds the numerical rank that was found and the expected rank.
    """

    def __init__(self, msg: str, rank: int = 0, expected: int = 0):
        super().__init__(msg)
        self.rank = rank
        self.expected = expected


class PartitionError(FrameToolkitError):
    """Index sets do not form a partition of the family."""
    pass


class DensityError(FrameToolkitError):
    """A density could not be evaluated (non-periodic input, zero energy, bad mode)."""
    pass


class EnumerationCapError(DensityError):
    """A box enumeration would exceed the configured cap."""

    def __init__(self, msg: str, requested: int = 0, cap: int = 0):
        super().__init__(msg)
        self.requested = requested
        self.cap = cap


class LocalizationError(FrameToolkitError):
    """Envelope or tail computation failed."""
    pass


class DualPairError(LocalizationError):
    """
    A supplied dual family does not reconstruct the reference family.

    Holds the measured residual.
    """

    def __init__(self, msg: str, residual: float = float("nan")):
        super().__init__(msg)
        self.residual = residual


class SelectionInfeasibleError(FrameToolkitError):
    """
    A selection strategy could not certify the requested bound.

    Never returned silently: the best subset found and its certificate are
    attached so callers can inspect what was achievable.
    """

    def __init__(
        self,
        msg: str,
        best_subset: Optional[List[Any]] = None,
        certificate: float = 0.0,
        required: float = 0.0,
    ):
        super().__init__(msg)
        self.best_subset = list(best_subset or [])
        self.certificate = certificate
        self.required = required


class InfeasibleParametersError(FrameToolkitError):
    """
    No parameter choice on the search grid satisfies the blockwise inequalities.

    ``constraint`` names the binding inequality, ``record`` holds the partial
    parameter trace at the point of failure.
    """

    def __init__(self, msg: str, constraint: str = "", record: Optional[Dict[str, Any]] = None):
        super().__init__(msg)
        self.constraint = constraint
        self.record = dict(record or {})


class GaborError(FrameToolkitError):
    """Invalid time-frequency input (zero window, duplicate points, bad lattice)."""
    pass


class ConfigError(FrameToolkitError):
    """Experiment configuration failed validation; ``path`` locates the field."""

    def __init__(self, msg: str, path: str = ""):
        super().__init__(msg)
        self.path = path
