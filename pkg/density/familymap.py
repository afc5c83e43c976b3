"""
Localization maps a: I -> G on a finite window of the index set.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from frames.family import normalize_label
from .group import FgaGroup, GroupPoint


@dataclass(eq=False)
class IndexedFamilyMap:
    """
    A total map from family labels to group points.

    ``points[j]`` is a(labels[j]); cyclic coordinates are stored reduced.
    """
    group: FgaGroup
    labels: Tuple[Hashable, ...]
    points: np.ndarray
    _positions: Dict[Hashable, int] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.labels = tuple(normalize_label(l) for l in self.labels)
        self.points = self.group.reduce_array(np.asarray(self.points, dtype=np.int64).reshape(len(self.labels), -1))
        self._positions = {l: j for j, l in enumerate(self.labels)}
        if len(self._positions) != len(self.labels):
            raise ValueError("map labels must be pairwise distinct")

    @classmethod
    def from_function(cls, group: FgaGroup, labels: Iterable[Any], fn: Callable[[Any], Sequence[int]]) -> "IndexedFamilyMap":
        labels = list(labels)
        pts = [tuple(np.atleast_1d(fn(l)).tolist()) for l in labels]
        return cls(group, tuple(labels), np.asarray(pts, dtype=np.int64).reshape(len(labels), group.rank))

    @classmethod
    def from_mapping(cls, group: FgaGroup, mapping: Mapping[Any, Sequence[int]]) -> "IndexedFamilyMap":
        labels = list(mapping.keys())
        return cls.from_function(group, labels, lambda l: mapping[l])

    @classmethod
    def identity(cls, group: FgaGroup, labels: Iterable[Any]) -> "IndexedFamilyMap":
        """a = id on labels that are themselves group points"""
        return cls.from_function(group, labels, lambda l: l if isinstance(l, tuple) else (l,))

    def __len__(self) -> int:
        return len(self.labels)

    def __call__(self, label: Any) -> GroupPoint:
        return tuple(int(x) for x in self.points[self._positions[normalize_label(label)]])

    def positions_of(self, labels: Iterable[Any]) -> np.ndarray:
        return np.asarray([self._positions[normalize_label(l)] for l in labels], dtype=np.int64)

    def points_of(self, labels: Optional[Iterable[Any]] = None) -> np.ndarray:
        if labels is None:
            return self.points
        return self.points[self.positions_of(labels)].reshape(-1, self.group.rank)

    def restrict(self, labels: Iterable[Any]) -> "IndexedFamilyMap":
        labels = [normalize_label(l) for l in labels]
        return IndexedFamilyMap(self.group, tuple(labels), self.points_of(labels))

    def shifted(self, shift: Sequence[int]) -> "IndexedFamilyMap":
        return IndexedFamilyMap(self.group, self.labels, self.points + np.asarray(shift, dtype=np.int64)[None, :])

    def free_extent(self) -> Tuple[np.ndarray, np.ndarray]:
        """Bounding box of the free coordinates of a(I)"""
        free = self.points[:, : self.group.free_rank]
        return free.min(axis=0), free.max(axis=0)

    def to_dict(self) -> Dict[str, Any]:
        def _label(l):
            return list(l) if isinstance(l, tuple) else l
        return {
            "group": self.group.to_dict(),
            "labels": [_label(l) for l in self.labels],
            "points": self.points.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IndexedFamilyMap":
        group = FgaGroup(data["group"]["free_rank"], tuple(data["group"]["cyclic_moduli"]))
        labels = [normalize_label(l) for l in data["labels"]]
        return cls(group, tuple(labels), np.asarray(data["points"], dtype=np.int64))

    def write_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f)
        return path

    @classmethod
    def read_json(cls, path: Union[str, Path]) -> "IndexedFamilyMap":
        with open(path, "r") as f:
            return cls.from_dict(json.load(f))
