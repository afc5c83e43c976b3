"""
Selection results and per-block records.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Hashable, List, Optional, Tuple, Union

import numpy as np

from frames.family import normalize_label


def _label(l: Any) -> Any:
    return list(l) if isinstance(l, tuple) else l


@dataclass
class BlockRecord:
    """One block of the blockwise construction"""
    center: Tuple[int, ...]
    size: int  # |F_k|
    selected: int  # |J_k| before the border trim
    trimmed: int  # elements removed by the trim
    lambda_min: float  # lambda_min of the truncated, trimmed block
    certificate: float = 0.0

    @property
    def kept(self) -> int:
        return self.selected - self.trimmed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": list(self.center),
            "size": self.size,
            "selected": self.selected,
            "trimmed": self.trimmed,
            "kept": self.kept,
            "lambda_min": self.lambda_min,
            "certificate": self.certificate,
        }


@dataclass
class SelectionResult:
    """
    A selected subset J with its certificates.

    ``achieved_lower`` is lambda_min(Gram(F_J)); ``certified_c`` is the curve
    value the strategy certified on normalized columns.
    """
    selected: List[Hashable]
    achieved_lower: float
    achieved_upper: float
    size_ratio: float
    strategy: str
    epsilon: float
    u: float
    T_norm: float
    certified_c: float = 0.0
    required_c: float = 0.0
    delta: Optional[float] = None
    params: Optional[Any] = None
    per_block: List[BlockRecord] = field(default_factory=list)
    chain: Dict[str, Any] = field(default_factory=dict)
    trace: Dict[str, Any] = field(default_factory=dict)
    # kept for re-verification, never serialized
    source: Optional[Any] = field(default=None, repr=False)
    family_map: Optional[Any] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.selected)

    @property
    def blockwise(self) -> bool:
        return bool(self.per_block)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "selected": [_label(l) for l in self.selected],
            "size": self.size,
            "achieved_lower": self.achieved_lower,
            "achieved_upper": self.achieved_upper,
            "size_ratio": self.size_ratio,
            "strategy": self.strategy,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "u": self.u,
            "T_norm": self.T_norm,
            "certified_c": self.certified_c,
            "required_c": self.required_c,
            "params": self.params.to_dict() if self.params is not None else None,
            "per_block": [b.to_dict() for b in self.per_block],
            "chain": self.chain,
            "trace": _plain(self.trace),
        }

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        text = json.dumps(self.to_dict(), indent=2, default=_default)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[Any] = None) -> "SelectionResult":
        """
        Rebuild a stored result. Block records and the recorded chain come
        back; derived parameters and the family map do not, so re-verification
        of a blockwise result needs the map supplied separately.
        """
        result = cls(
            selected=[normalize_label(l) for l in data["selected"]],
            achieved_lower=float(data["achieved_lower"]),
            achieved_upper=float(data["achieved_upper"]),
            size_ratio=float(data["size_ratio"]),
            strategy=data["strategy"],
            epsilon=float(data["epsilon"]),
            u=float(data["u"]),
            T_norm=float(data["T_norm"]),
            certified_c=float(data.get("certified_c", 0.0)),
            required_c=float(data.get("required_c", 0.0)),
            delta=data.get("delta"),
            chain=dict(data.get("chain") or {}),
            trace=dict(data.get("trace") or {}),
            source=source,
        )
        result.per_block = [
            BlockRecord(tuple(b["center"]), b["size"], b["selected"], b["trimmed"], b["lambda_min"], b.get("certificate", 0.0))
            for b in data.get("per_block") or []
        ]
        return result

    @classmethod
    def read_json(cls, path: Union[str, Path], source: Optional[Any] = None) -> "SelectionResult":
        return cls.from_dict(json.loads(Path(path).read_text()), source=source)

    def summary_row(self) -> Dict[str, Any]:
        """Flat record for the batch CSV"""
        return {
            "strategy": self.strategy,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "size": self.size,
            "size_ratio": self.size_ratio,
            "achieved_lower": self.achieved_lower,
            "achieved_upper": self.achieved_upper,
            "certified_c": self.certified_c,
            "required_c": self.required_c,
            "u": self.u,
            "T_norm": self.T_norm,
            "blocks": len(self.per_block),
        }


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return _default(obj) if isinstance(obj, (np.generic, np.ndarray)) else obj


def _default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)
