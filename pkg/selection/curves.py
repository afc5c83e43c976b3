"""
Reference Curves

Monotone functions c: (0, 1) -> (0, 1) that state the lower Riesz bound a
selection at tolerance epsilon is expected to reach (in units of u^2).
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate


class ReferenceCurve(ABC):
    """Base class for reference curves"""

    name: str = "curve"

    @abstractmethod
    def __call__(self, epsilon: float) -> float:
        pass

    def grid(self, points: int = 1000) -> Tuple[np.ndarray, np.ndarray]:
        eps = np.linspace(0.0, 1.0, points + 2)[1:-1]
        return eps, np.array([self(e) for e in eps])

    def is_monotone(self, points: int = 1000, tol: float = 1e-12) -> bool:
        _, values = self.grid(points)
        diffs = np.diff(values)
        return bool(np.all(diffs >= -tol) or np.all(diffs <= tol))

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name}


@dataclass
class BarrierCurve(ReferenceCurve):
    """c(eps) = (1 - sqrt(1 - eps))^2, the bound certified by barrier selection on unit columns"""
    name: str = "barrier"

    def __call__(self, epsilon: float) -> float:
        return float((1.0 - np.sqrt(1.0 - epsilon)) ** 2)


@dataclass
class ConstantCurve(ReferenceCurve):
    value: float = 0.1
    name: str = "constant"

    def __call__(self, epsilon: float) -> float:
        return float(self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "value": self.value}


@dataclass
class PowerCurve(ReferenceCurve):
    """c(eps) = scale * eps^exponent"""
    exponent: float = 2.0
    scale: float = 0.25
    name: str = "power"

    def __call__(self, epsilon: float) -> float:
        return float(self.scale * epsilon ** self.exponent)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "exponent": self.exponent, "scale": self.scale}


@dataclass
class StepCurve(ReferenceCurve):
    """Right-continuous steps: value[j] on [breaks[j-1], breaks[j])"""
    breaks: Sequence[float] = (0.5,)
    values: Sequence[float] = (0.05, 0.2)
    name: str = "step"

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("step curve needs one more value than breaks")

    def __call__(self, epsilon: float) -> float:
        return float(self.values[int(np.searchsorted(self.breaks, epsilon, side="right"))])

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "breaks": list(self.breaks), "values": list(self.values)}


@dataclass
class TabulatedCurve(ReferenceCurve):
    """Piecewise linear through (epsilon, c) samples"""
    epsilons: Sequence[float] = (0.0, 1.0)
    values: Sequence[float] = (0.0, 1.0)
    name: str = "tabulated"

    def __call__(self, epsilon: float) -> float:
        return float(np.interp(epsilon, self.epsilons, self.values))

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "epsilons": list(self.epsilons), "values": list(self.values)}


@dataclass
class SmoothedCurve(ReferenceCurve):
    """c_zeta(eps) = (1/zeta) * integral of c_raw over [max(0, eps - zeta), eps]"""
    raw: ReferenceCurve = field(default_factory=BarrierCurve)
    zeta: float = 0.05
    name: str = "smoothed"

    def __call__(self, epsilon: float) -> float:
        lo = max(0.0, epsilon - self.zeta)
        if epsilon <= lo:
            return float(self.raw(epsilon))
        points = _breakpoints(self.raw, lo, epsilon)
        value, _ = integrate.quad(self.raw, lo, epsilon, points=points or None, limit=200)
        return float(value / self.zeta)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "zeta": self.zeta, "raw": self.raw.to_dict()}


def _breakpoints(curve: ReferenceCurve, lo: float, hi: float) -> Optional[List[float]]:
    if isinstance(curve, StepCurve):
        return [b for b in curve.breaks if lo < b < hi]
    return None


def smooth_c_curve(raw: ReferenceCurve, zeta: float) -> SmoothedCurve:
    """
    Averaged curve over a trailing window of width zeta.

    The result is continuous; it stays monotone when raw is, and lies below
    raw wherever raw is nondecreasing.
    """
    if zeta <= 0:
        raise ValueError(f"smoothing width must be positive, got {zeta}")
    return SmoothedCurve(raw=raw, zeta=float(zeta))


_CURVES: Dict[str, Callable[..., ReferenceCurve]] = {
    "barrier": BarrierCurve,
    "constant": ConstantCurve,
    "power": PowerCurve,
    "step": StepCurve,
    "tabulated": TabulatedCurve,
}


def make_curve(params: Optional[Dict[str, Any]] = None) -> ReferenceCurve:
    """Build a curve from {"name": ..., **params}; {"zeta": z} wraps it in smoothing"""
    params = dict(params or {"name": "barrier"})
    name = params.pop("name", "barrier")
    zeta = params.pop("zeta", None)
    if name not in _CURVES:
        raise ValueError(f"unknown reference curve '{name}', expected one of {sorted(_CURVES)}")
    curve = _CURVES[name](**params)
    return smooth_c_curve(curve, zeta) if zeta is not None else curve
