"""
Density estimates: exact values or finite-radius sweeps with extrapolation.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

logger = logging.getLogger(__name__)

Number = Union[float, Fraction]


def _jsonable(value: Number) -> Any:
    if isinstance(value, Fraction):
        return {"fraction": f"{value.numerator}/{value.denominator}", "value": float(value)}
    if value == float("inf"):
        return "inf"
    return float(value)


@dataclass
class DensityEstimate:
    """
    Lower and upper density of a set, family or point configuration.

    ``sweep`` holds (R, inf over centers, sup over centers). ``exact`` marks
    values obtained from periodic structure rather than extrapolation.
    """
    lower: Number
    upper: Number
    exact: bool = False
    sweep: List[Tuple[int, float, float]] = field(default_factory=list)
    diverging: bool = False
    extrapolation: Dict[str, Any] = field(default_factory=dict)
    admission: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def uniform(self) -> bool:
        if self.exact:
            return self.lower == self.upper
        return abs(float(self.upper) - float(self.lower)) <= 1e-9 * max(1.0, abs(float(self.upper)))

    @property
    def value(self) -> Number:
        """The density when uniform, otherwise the lower density"""
        return self.lower

    def sweep_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.sweep, columns=["R", "inf_value", "sup_value"])

    def write_sweep_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.sweep_frame().to_csv(path, index=False)
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower": _jsonable(self.lower),
            "upper": _jsonable(self.upper),
            "exact": self.exact,
            "diverging": self.diverging,
            "uniform": self.uniform,
            "sweep_points": len(self.sweep),
            "extrapolation": self.extrapolation,
            "admission": [[int(c), float(v)] for c, v in self.admission],
        }


def exact_estimate(value: Fraction) -> DensityEstimate:
    return DensityEstimate(lower=value, upper=value, exact=True)


def extrapolate_sweep(sweep: Sequence[Tuple[int, float, float]], tail: int) -> Tuple[float, float, Dict[str, Any]]:
    """
    Fit value ~ L + c/R on the last ``tail`` sweep points and return the limits.

    Falls back to the last measured values when fewer than three radii are available.
    """
    if not sweep:
        return 0.0, 0.0, {"method": "empty"}
    rows = list(sweep)[-tail:]
    if len(rows) < 3:
        _, lo, hi = rows[-1]
        return float(lo), float(hi), {"method": "last", "points": len(rows)}

    X = 1.0 / np.array([r for r, _, _ in rows], dtype=float).reshape(-1, 1)
    fits = {}
    for name, col in (("lower", 1), ("upper", 2)):
        y = np.array([row[col] for row in rows], dtype=float)
        model = LinearRegression().fit(X, y)
        fits[name] = (float(model.intercept_), float(model.coef_[0]))
    lower = max(0.0, fits["lower"][0])
    upper = max(0.0, fits["upper"][0])
    if lower > upper:
        lower, upper = upper, lower
    info = {
        "method": "inverse_radius",
        "points": len(rows),
        "lower_fit": {"limit": fits["lower"][0], "slope": fits["lower"][1]},
        "upper_fit": {"limit": fits["upper"][0], "slope": fits["upper"][1]},
    }
    logger.debug("sweep extrapolation %s", info)
    return lower, upper, info
