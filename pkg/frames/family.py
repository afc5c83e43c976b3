"""
Vector Families

Indexed finite families of complex vectors, stored column-wise.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import DimensionMismatchError


def normalize_label(label: Any) -> Hashable:
    """Labels are kept hashable: lists and arrays become tuples of python scalars"""
    if isinstance(label, np.ndarray):
        label = label.tolist()
    if isinstance(label, (list, tuple)):
        return tuple(normalize_label(x) for x in label)
    if isinstance(label, np.integer):
        return int(label)
    if isinstance(label, np.floating):
        return float(label)
    return label


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """
    A finite family {f_i} of vectors in C^m.

    ``matrix`` has shape (m, N); column j is the vector labelled ``labels[j]``.
    The matrix is also the synthesis operator of the family.
    """
    matrix: np.ndarray
    labels: Tuple[Hashable, ...] = ()
    _positions: Dict[Hashable, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.ndim == 1:
            mat = mat.reshape(-1, 1)
        if mat.ndim != 2 or mat.shape[0] < 1:
            raise DimensionMismatchError(f"family matrix must be 2-D with m >= 1, got shape {mat.shape}")
        labels = tuple(normalize_label(l) for l in self.labels) if len(self.labels) else tuple(range(mat.shape[1]))
        if len(labels) != mat.shape[1]:
            raise DimensionMismatchError(f"{len(labels)} labels for {mat.shape[1]} vectors")
        positions = {label: j for j, label in enumerate(labels)}
        if len(positions) != len(labels):
            raise ValueError("family labels must be pairwise distinct")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_positions", positions)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[complex]], labels: Optional[Sequence[Any]] = None) -> "VectorFamily":
        """Build from a list of vectors (all of the same length)"""
        vectors = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
        if not vectors:
            raise DimensionMismatchError("cannot build a family from zero vectors")
        dims = {v.shape[0] for v in vectors}
        if len(dims) != 1:
            raise DimensionMismatchError(f"vectors have differing ambient dimensions {sorted(dims)}")
        return cls(np.column_stack(vectors), tuple(labels) if labels is not None else ())

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, labels: Optional[Sequence[Any]] = None) -> "VectorFamily":
        return cls(np.asarray(matrix), tuple(labels) if labels is not None else ())

    def __len__(self) -> int:
        return self.matrix.shape[1]

    @property
    def dim(self) -> int:
        """Ambient dimension m"""
        return self.matrix.shape[0]

    @property
    def vectors(self) -> List[np.ndarray]:
        return [self.matrix[:, j] for j in range(len(self))]

    def index_of(self, label: Any) -> int:
        return self._positions[normalize_label(label)]

    def has_label(self, label: Any) -> bool:
        return normalize_label(label) in self._positions

    def vector(self, label: Any) -> np.ndarray:
        return self.matrix[:, self.index_of(label)]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=0)

    def take(self, positions: Iterable[int]) -> "VectorFamily":
        """Subfamily by column positions, in the given order"""
        positions = list(positions)
        return VectorFamily(self.matrix[:, positions], tuple(self.labels[j] for j in positions))

    def subfamily(self, labels: Iterable[Any]) -> "VectorFamily":
        """Subfamily by labels, in the given order"""
        return self.take(self.index_of(l) for l in labels)

    def scaled(self, c: complex) -> "VectorFamily":
        return VectorFamily(self.matrix * c, self.labels)

    def with_matrix(self, matrix: np.ndarray) -> "VectorFamily":
        """Same labels, new vectors (e.g. after truncation)"""
        matrix = np.asarray(matrix)
        if matrix.shape[1] != len(self):
            raise DimensionMismatchError(f"expected {len(self)} columns, got {matrix.shape[1]}")
        return VectorFamily(matrix, self.labels)

    def relabel(self, labels: Sequence[Any]) -> "VectorFamily":
        return VectorFamily(self.matrix, tuple(labels))

    def concat(self, other: "VectorFamily") -> "VectorFamily":
        if other.dim != self.dim:
            raise DimensionMismatchError(f"ambient dimensions differ: {self.dim} vs {other.dim}")
        return VectorFamily(np.hstack([self.matrix, other.matrix]), self.labels + other.labels)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ambient_dim": self.dim,
            "size": len(self),
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
        }


def label_points(family: VectorFamily) -> np.ndarray:
    """
    Interpret the labels of a reference family as group points.

    Integer labels become 1-tuples. Returns an int array of shape (N, d).
    """
    rows = [l if isinstance(l, tuple) else (l,) for l in family.labels]
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), -1)
