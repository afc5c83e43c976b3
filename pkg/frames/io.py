"""
VectorFamily serialization.

CSV: one row per vector, a ``label`` column (JSON text) followed by
interleaved ``re_k``/``im_k`` columns. JSON: ambient dimension, labels and
[re, im] pairs per entry.
"""
import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from errors import DimensionMismatchError
from .family import VectorFamily, normalize_label


def _label_to_json(label: Any) -> Any:
    if isinstance(label, tuple):
        return [_label_to_json(x) for x in label]
    return label


def family_to_frame(family: VectorFamily) -> pd.DataFrame:
    T = family.matrix
    columns: Dict[str, Any] = {"label": [json.dumps(_label_to_json(l)) for l in family.labels]}
    for k in range(family.dim):
        columns[f"re_{k}"] = T[k, :].real
        columns[f"im_{k}"] = T[k, :].imag
    return pd.DataFrame(columns)


def family_from_frame(frame: pd.DataFrame) -> VectorFamily:
    re_cols = [c for c in frame.columns if c.startswith("re_")]
    im_cols = [c for c in frame.columns if c.startswith("im_")]
    if len(re_cols) != len(im_cols) or not re_cols:
        raise DimensionMismatchError("CSV must carry matching re_k/im_k column pairs")
    re_cols.sort(key=lambda c: int(c[3:]))
    im_cols.sort(key=lambda c: int(c[3:]))
    matrix = frame[re_cols].to_numpy(dtype=float).T + 1j * frame[im_cols].to_numpy(dtype=float).T
    labels = [normalize_label(json.loads(l)) for l in frame["label"]] if "label" in frame else None
    return VectorFamily.from_matrix(matrix, labels)


def write_family_csv(family: VectorFamily, path: Union[str, Path]) -> Path:
    path = Path(path)
    family_to_frame(family).to_csv(path, index=False, float_format="%.17g")
    return path


def read_family_csv(path: Union[str, Path]) -> VectorFamily:
    return family_from_frame(pd.read_csv(path, dtype={"label": str}))


def family_to_json(family: VectorFamily) -> Dict[str, Any]:
    T = family.matrix
    return {
        "ambient_dim": family.dim,
        "labels": [_label_to_json(l) for l in family.labels],
        "vectors": [[[float(z.real), float(z.imag)] for z in T[:, j]] for j in range(len(family))],
    }


def family_from_json(data: Dict[str, Any]) -> VectorFamily:
    vectors = data["vectors"]
    dim = int(data["ambient_dim"])
    columns = []
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in a family of ambient dimension {dim}")
        arr = np.asarray(v, dtype=float).reshape(dim, 2)
        columns.append(arr[:, 0] + 1j * arr[:, 1])
    labels = [normalize_label(l) for l in data.get("labels", range(len(columns)))]
    return VectorFamily.from_vectors(columns, labels)


def write_family_json(family: VectorFamily, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w") as f:
        json.dump(family_to_json(family), f, indent=1)
    return path


def read_family_json(path: Union[str, Path]) -> VectorFamily:
    with open(path, "r") as f:
        return family_from_json(json.load(f))
