"""
Envelopes

Nonnegative functions r on a window of the group that dominate the
coefficients |<f_i, g_k'>| at offset a(i) - k'.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Hashable, Optional, Union

import numpy as np
import pandas as pd

from density.group import FgaGroup, GroupPoint
from .decay import DecayFit, Verdict, shell_maxima


@dataclass(eq=False)
class Envelope:
    """
    Envelope values at distinct group offsets.

    ``offsets`` holds one group point per row, cyclic coordinates centred in
    (-N/2, N/2]. Offsets missing from the table carry the value 0.
    """
    group: FgaGroup
    offsets: np.ndarray
    values: np.ndarray
    p: int = 1
    window_radius: int = 0

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=np.int64).reshape(-1, self.group.rank)
        self.values = np.asarray(self.values, dtype=float).ravel()
        if len(self.values) != len(self.offsets):
            raise ValueError("one value per offset expected")
        if np.any(self.values < 0):
            raise ValueError("envelope values must be nonnegative")

    @property
    def radii(self) -> np.ndarray:
        return self.group.norm(self.offsets)

    def value_at(self, offset: GroupPoint) -> float:
        target = self.group.centered_offsets(np.asarray(offset, dtype=np.int64).reshape(1, -1))[0]
        hits = np.nonzero(np.all(self.offsets == target, axis=1))[0]
        return float(self.values[hits[0]]) if hits.size else 0.0

    def support(self, floor: float = 0.0) -> np.ndarray:
        return self.offsets[self.values > floor]

    def tail_sum(self, R: int) -> float:
        """Delta_r(R) = sum of r(k) over ||k||_inf > R inside the window"""
        return float(self.values[self.radii > R].sum())

    def tail_sums(self, r_max: Optional[int] = None) -> np.ndarray:
        r_max = self.window_radius if r_max is None else r_max
        return np.array([self.tail_sum(R) for R in range(r_max + 1)])

    def total(self) -> float:
        return float(self.values.sum())

    def shell_maxima(self) -> np.ndarray:
        return shell_maxima(self.values, self.radii, self.window_radius + 1)

    def shifted_by(self, bound: int) -> "Envelope":
        """r'(k) = max_{||j||_inf <= bound} r(k + j)"""
        if bound <= 0:
            return Envelope(self.group, self.offsets.copy(), self.values.copy(), self.p, self.window_radius)
        steps = np.stack(np.meshgrid(*[np.arange(-bound, bound + 1)] * self.group.rank, indexing="ij"), -1)
        steps = steps.reshape(-1, self.group.rank)
        moved = self.group.centered_offsets((self.offsets[:, None, :] - steps[None, :, :]).reshape(-1, self.group.rank))
        vals = np.repeat(self.values, len(steps))
        uniq, inverse = np.unique(moved, axis=0, return_inverse=True)
        out = np.zeros(len(uniq))
        np.maximum.at(out, inverse.ravel(), vals)
        return Envelope(self.group, uniq, out, self.p, self.window_radius + bound)

    def to_frame(self) -> pd.DataFrame:
        cols = {f"k{j}": self.offsets[:, j] for j in range(self.group.rank)}
        frame = pd.DataFrame(cols)
        frame["value"] = self.values
        return frame.sort_values(list(cols)).reset_index(drop=True)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False)
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group.to_dict(),
            "p": self.p,
            "window_radius": self.window_radius,
            "offsets": self.offsets.tolist(),
            "values": self.values.tolist(),
        }


@dataclass
class LocalizationReport:
    envelope: Envelope
    minimal: bool
    verdict: Verdict
    fit: DecayFit
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def decay_exponent(self) -> Optional[float]:
        return self.fit.rate if self.fit.kind != "compact" else None

    @property
    def supported(self) -> bool:
        return self.verdict is Verdict.SUPPORTED

    def to_dict(self) -> Dict[str, Any]:
        tails = self.envelope.tail_sums()
        return {
            "minimal": self.minimal,
            "p": self.envelope.p,
            "verdict": self.verdict.value,
            "fit": self.fit.to_dict(),
            "decay_exponent": self.decay_exponent,
            "total": self.envelope.total(),
            "tail_sums": tails.tolist(),
            "shell_maxima": self.envelope.shell_maxima().tolist(),
            "diagnostics": self.diagnostics,
        }


@dataclass
class CenterAssignment:
    group: FgaGroup
    centers: Dict[Hashable, GroupPoint]

    def __getitem__(self, label: Hashable) -> GroupPoint:
        return self.centers[label]

    def __len__(self) -> int:
        return len(self.centers)

    def to_dict(self) -> Dict[str, Any]:
        return {str(k): list(v) for k, v in self.centers.items()}
