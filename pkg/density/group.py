"""
Finitely Generated Abelian Groups

G = Z^d1 x Z_N1 x ... x Z_Nd2 with the box metric used for densities.
Cyclic coordinates are stored reduced and measured with circular distance,
so every box B_R(k) has the same cardinality.
"""
import itertools
import logging
from dataclasses import dataclass
from math import prod
from typing import Callable, List, Sequence, Tuple

import numpy as np

from config import get_config
from errors import EnumerationCapError

logger = logging.getLogger(__name__)

GroupPoint = Tuple[int, ...]


@dataclass(frozen=True)
class FgaGroup:
    """Z^free_rank x Z_{N_1} x ... x Z_{N_d2}"""
    free_rank: int = 1
    cyclic_moduli: Tuple[int, ...] = ()

    def __post_init__(self):
        moduli = tuple(int(n) for n in self.cyclic_moduli)
        object.__setattr__(self, "cyclic_moduli", moduli)
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        if any(n < 1 for n in moduli):
            raise ValueError(f"cyclic moduli must be >= 1, got {moduli}")
        if self.free_rank + len(moduli) < 1:
            raise ValueError("group needs at least one coordinate")

    @classmethod
    def integers(cls, d: int = 1) -> "FgaGroup":
        return cls(free_rank=d)

    @classmethod
    def cyclic(cls, *moduli: int) -> "FgaGroup":
        return cls(free_rank=0, cyclic_moduli=tuple(moduli))

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.cyclic_moduli)

    @property
    def torsion_order(self) -> int:
        return prod(self.cyclic_moduli) if self.cyclic_moduli else 1

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("group with free part is infinite")
        return self.torsion_order

    def to_dict(self):
        return {"free_rank": self.free_rank, "cyclic_moduli": list(self.cyclic_moduli)}

    # -- coordinates -----------------------------------------------------

    def reduce(self, coords: Sequence[int]) -> GroupPoint:
        coords = [int(c) for c in coords]
        if len(coords) != self.rank:
            raise ValueError(f"point has {len(coords)} coordinates, group rank is {self.rank}")
        free = coords[: self.free_rank]
        cyc = [c % n for c, n in zip(coords[self.free_rank:], self.cyclic_moduli)]
        return tuple(free + cyc)

    def reduce_array(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64).reshape(-1, self.rank).copy()
        for j, n in enumerate(self.cyclic_moduli):
            points[:, self.free_rank + j] %= n
        return points

    def centered_offsets(self, offsets: np.ndarray) -> np.ndarray:
        """Represent differences with cyclic coordinates in (-N/2, N/2]"""
        offsets = self.reduce_array(offsets)
        for j, n in enumerate(self.cyclic_moduli):
            col = offsets[:, self.free_rank + j]
            offsets[:, self.free_rank + j] = np.where(col > n // 2, col - n, col)
        return offsets

    def coordinate_distances(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Per-coordinate distance |a(j) - b(j)|, circular on cyclic coordinates"""
        diff = np.abs(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64))
        for j, n in enumerate(self.cyclic_moduli):
            col = diff[..., self.free_rank + j] % n
            diff[..., self.free_rank + j] = np.minimum(col, n - col)
        return diff

    def distance(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Box norm ||a - b||_inf (arrays of points broadcast over leading axes)"""
        return self.coordinate_distances(a, b).max(axis=-1)

    def norm(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        return self.distance(points, np.zeros(self.rank, dtype=np.int64))

    # -- boxes -------------------------------------------------------------

    def box_size(self, radius: int) -> int:
        """|B_R(k)|, the same for every center"""
        side = 2 * int(radius) + 1
        return side ** self.free_rank * prod(min(n, side) for n in self.cyclic_moduli)

    def max_radius(self) -> int:
        """Largest distance realized between two points (infinite groups: none)"""
        if not self.is_finite:
            raise ValueError("infinite group has unbounded distances")
        return max(n // 2 for n in self.cyclic_moduli)


@dataclass(frozen=True)
class Box:
    """B_R(center)"""
    center: GroupPoint
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("box radius must be nonnegative")
        object.__setattr__(self, "center", tuple(int(c) for c in self.center))


def _axis_values(group: FgaGroup, box: Box, j: int) -> List[int]:
    c, R = box.center[j], box.radius
    if j < group.free_rank:
        return list(range(c - R, c + R + 1))
    n = group.cyclic_moduli[j - group.free_rank]
    if 2 * R + 1 >= n:
        return list(range(n))
    return sorted({(c + t) % n for t in range(-R, R + 1)})


def box_points(group: FgaGroup, box: Box, cap: int = None) -> List[GroupPoint]:
    """All points g with ||g - center||_inf <= R"""
    cap = get_config().density.enumeration_cap if cap is None else cap
    if len(box.center) != group.rank:
        raise ValueError(f"box center has {len(box.center)} coordinates, group rank is {group.rank}")
    size = group.box_size(box.radius)
    if size > cap:
        raise EnumerationCapError(f"box of radius {box.radius} has {size} points (cap {cap})", requested=size, cap=cap)
    center = group.reduce(box.center)
    box = Box(center, box.radius)
    axes = [_axis_values(group, box, j) for j in range(group.rank)]
    return [tuple(p) for p in itertools.product(*axes)]


def box_points_array(group: FgaGroup, box: Box, cap: int = None) -> np.ndarray:
    return np.asarray(box_points(group, box, cap), dtype=np.int64).reshape(-1, group.rank)


class GroupFlattening:
    """
    Bijection U: Z^d -> Z^d x H for a group with free rank d >= 1 and finite part H.

        U(k_1..k_d) = (k_1, ..., k_{d-1}, floor(k_d / N), u(k_d mod N))

    where u enumerates H in lexicographic (mixed radix) order and N = |H|.
    """

    def __init__(self, group: FgaGroup):
        if group.free_rank < 1:
            raise ValueError("flattening needs at least one free coordinate")
        self.group = group
        self.source = FgaGroup.integers(group.free_rank)
        self.torsion_order = group.torsion_order
        self._radix = np.array(
            [prod(group.cyclic_moduli[j + 1:]) for j in range(len(group.cyclic_moduli))], dtype=np.int64
        )

    def enumerate_torsion(self, r: np.ndarray) -> np.ndarray:
        """u(r): mixed-radix digits of r, last coordinate fastest"""
        r = np.asarray(r, dtype=np.int64).reshape(-1)
        if not self.group.cyclic_moduli:
            return np.zeros((r.shape[0], 0), dtype=np.int64)
        moduli = np.array(self.group.cyclic_moduli, dtype=np.int64)
        return (r[:, None] // self._radix[None, :]) % moduli[None, :]

    def torsion_index(self, h: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=np.int64).reshape(-1, len(self.group.cyclic_moduli))
        return (h * self._radix[None, :]).sum(axis=1) if self.group.cyclic_moduli else np.zeros(h.shape[0], np.int64)

    def forward(self, k: np.ndarray) -> np.ndarray:
        """U applied to rows of k (shape (M, d))"""
        k = np.asarray(k, dtype=np.int64).reshape(-1, self.group.free_rank)
        N = self.torsion_order
        last = k[:, -1]
        head = np.column_stack([k[:, :-1], np.floor_divide(last, N)])
        return np.hstack([head, self.enumerate_torsion(np.mod(last, N))])

    def inverse(self, g: np.ndarray) -> np.ndarray:
        g = self.group.reduce_array(g)
        d = self.group.free_rank
        N = self.torsion_order
        last = g[:, d - 1] * N + self.torsion_index(g[:, d:])
        return np.column_stack([g[:, : d - 1], last])

    def __call__(self, k: Sequence[int]) -> GroupPoint:
        return tuple(int(x) for x in self.forward(np.asarray([k]))[0])

    def invert(self, g: Sequence[int]) -> GroupPoint:
        return tuple(int(x) for x in self.inverse(np.asarray([g]))[0])


def flatten_group(group: FgaGroup) -> Tuple[GroupFlattening, Callable[[Sequence[int]], GroupPoint]]:
    """(U, U^-1) for G = Z^d x H"""
    flattening = GroupFlattening(group)
    return flattening, flattening.invert

