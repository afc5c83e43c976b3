"""
Signals and time-frequency points on the cyclic grid Z_n.

Sample k sits at time t_k = k * spacing for k < n/2 and (k - n) * spacing
otherwise, so the grid is centred at the origin. The default spacing
1/sqrt(n) makes the time and frequency extents equal.
"""
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from errors import GaborError


@dataclass(eq=False)
class Signal:
    samples: np.ndarray
    grid_spacing: Optional[float] = None

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128).ravel()
        if arr.shape[0] < 2:
            raise GaborError(f"a signal needs at least 2 samples, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise GaborError("signal samples must be finite")
        self.samples = arr
        if self.grid_spacing is None:
            self.grid_spacing = 1.0 / math.sqrt(arr.shape[0])
        if self.grid_spacing <= 0:
            raise GaborError(f"grid spacing must be positive, got {self.grid_spacing}")

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))

    def times(self) -> np.ndarray:
        k = np.arange(self.n)
        return np.where(k < (self.n + 1) // 2, k, k - self.n) * self.grid_spacing

    def with_samples(self, samples: np.ndarray) -> "Signal":
        return Signal(samples, self.grid_spacing)

    def normalized(self) -> "Signal":
        nrm = self.norm()
        if nrm == 0:
            raise GaborError("cannot normalize the zero signal")
        return self.with_samples(self.samples / nrm)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k": np.arange(self.n), "re": self.samples.real, "im": self.samples.imag})

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    @classmethod
    def read_csv(cls, path: Union[str, Path], grid_spacing: Optional[float] = None) -> "Signal":
        frame = pd.read_csv(path).sort_values("k")
        return cls(frame["re"].to_numpy() + 1j * frame["im"].to_numpy(), grid_spacing)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "grid_spacing": self.grid_spacing,
            "samples": [[float(z.real), float(z.imag)] for z in self.samples],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Signal":
        arr = np.asarray(data["samples"], dtype=float).reshape(-1, 2)
        return cls(arr[:, 0] + 1j * arr[:, 1], data.get("grid_spacing"))


def gaussian(n: int, spacing: Optional[float] = None) -> Signal:
    """sqrt(dt) 2^{1/4} exp(-pi t^2) on the centred grid, rescaled to unit norm"""
    spacing = 1.0 / math.sqrt(n) if spacing is None else float(spacing)
    k = np.arange(n)
    t = np.where(k < (n + 1) // 2, k, k - n) * spacing
    samples = math.sqrt(spacing) * 2 ** 0.25 * np.exp(-math.pi * t * t)
    return Signal(samples / np.linalg.norm(samples), spacing)


def boxcar(n: int, width: int, alternating: bool = False) -> Signal:
    """Indicator of |k| <= width/2 around 0; ``alternating`` flips the sign of every other sample"""
    k = np.arange(n)
    centred = np.where(k < (n + 1) // 2, k, k - n)
    samples = (np.abs(centred) <= width // 2).astype(float)
    if alternating:
        samples = samples * np.where(centred % 2 == 0, 1.0, -1.0)
    return Signal(samples / np.linalg.norm(samples))


@dataclass(frozen=True, order=True)
class TFPoint:
    x: int
    omega: int

    def reduced(self, n: int) -> "TFPoint":
        return TFPoint(int(self.x) % n, int(self.omega) % n)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.x, self.omega)


@dataclass
class TFSet:
    """
    Finite set of time-frequency points in Z_n x Z_n.

    ``pattern`` describes lattices a Z_n x b Z_n when the set was built as one.
    """
    n: int
    points: List[TFPoint]
    pattern: Optional[Dict[str, int]] = None
    _index: Dict[TFPoint, int] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise GaborError(f"grid size must be at least 2, got {self.n}")
        pts = [TFPoint(*p).reduced(self.n) if not isinstance(p, TFPoint) else p.reduced(self.n)
               for p in self.points]
        index: Dict[TFPoint, int] = {}
        for j, p in enumerate(pts):
            if p in index:
                raise GaborError(f"duplicate time-frequency point {p.as_tuple()}")
            index[p] = j
        self.points = pts
        self._index = index

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "TFSet":
        return cls(n, [TFPoint(int(x), int(w)) for x, w in pairs])

    @classmethod
    def lattice(cls, n: int, a: int, b: int) -> "TFSet":
        """a Z_n x b Z_n; both steps must divide n"""
        if a <= 0 or b <= 0 or n % a or n % b:
            raise GaborError(f"lattice steps ({a}, {b}) must divide n = {n}")
        pts = [TFPoint(x, w) for x in range(0, n, a) for w in range(0, n, b)]
        return cls(n, pts, pattern={"a": a, "b": b})

    @classmethod
    def full(cls, n: int) -> "TFSet":
        return cls.lattice(n, 1, 1)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p: Any) -> bool:
        p = p if isinstance(p, TFPoint) else TFPoint(*p)
        return p.reduced(self.n) in self._index

    def as_array(self) -> np.ndarray:
        return np.asarray([p.as_tuple() for p in self.points], dtype=np.int64).reshape(-1, 2)

    def density(self) -> float:
        """|Lambda| / n^2, points per grid cell"""
        return len(self) / float(self.n * self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "points": [list(p.as_tuple()) for p in self.points], "pattern": self.pattern}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TFSet":
        return cls(int(data["n"]), [TFPoint(int(x), int(w)) for x, w in data["points"]], data.get("pattern"))

    def write_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict()))
        return path

    @classmethod
    def read_json(cls, path: Union[str, Path]) -> "TFSet":
        return cls.from_dict(json.loads(Path(path).read_text()))
