"""
Run reports: verified clauses, JSON output and console summaries.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from selection.verify import ClauseCheck


@dataclass
class Clause:
    """
    One checked numerical claim. ``relation`` is how ``measured`` must compare
    with ``threshold``: "ge", "le" or "eq", each within ``tolerance``.
    """
    name: str
    measured: float
    threshold: float
    tolerance: float = 0.0
    relation: str = "ge"
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        m, t, tol = float(self.measured), float(self.threshold), self.tolerance
        if self.relation == "ge":
            return bool(m >= t - tol - 1e-12)
        if self.relation == "le":
            return bool(m <= t + tol + 1e-12)
        if self.relation == "eq":
            if np.isinf(m) or np.isinf(t):
                return bool(m == t)
            return bool(abs(m - t) <= tol + 1e-12)
        raise ValueError(f"unknown relation '{self.relation}'")

    @classmethod
    def from_check(cls, check: ClauseCheck, prefix: str = "") -> "Clause":
        return cls(f"{prefix}{check.name}", check.measured, check.threshold, check.tolerance, check.relation,
                   dict(check.detail))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "measured": _number(self.measured),
            "threshold": _number(self.threshold),
            "tolerance": self.tolerance,
            "relation": self.relation,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class RunReport:
    config: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    clauses: List[Clause] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    sidecars: List[str] = field(default_factory=list)
    timestamp: str = ""
    tool: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        data = {
            "config": self.config,
            "results": self.results,
            "clauses": [c.to_dict() for c in self.clauses],
            "passed": self.passed,
            "sidecars": list(self.sidecars),
            "timestamp": self.timestamp,
            "tool": self.tool,
        }
        if include_timings:
            data["timings"] = self.timings
        return data

    def to_json(self, path: Optional[Union[str, Path]] = None, include_timings: bool = True) -> str:
        text = json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True, default=_default)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def summary_frame(self) -> pd.DataFrame:
        rows = [
            {k: v for k, v in c.to_dict().items() if k != "detail"}
            for c in self.clauses
        ]
        return pd.DataFrame(rows, columns=["name", "measured", "threshold", "tolerance", "relation", "passed"])

    def write_summary_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.summary_frame().to_csv(path, index=False)
        return path


def render_summary(report: RunReport, console: Optional[Console] = None) -> None:
    """Print the clause table for one run"""
    console = console or Console()
    name = report.config.get("name", "run")
    command = report.config.get("command", "")
    table = Table(title=f"{name} ({command})")
    table.add_column("Clause", style="cyan")
    table.add_column("Measured", justify="right")
    table.add_column("Threshold", justify="right")
    table.add_column("Tol", justify="right")
    table.add_column("Result")
    for c in report.clauses:
        table.add_row(
            c.name,
            _fmt(c.measured),
            f"{_symbol(c.relation)} {_fmt(c.threshold)}",
            f"{c.tolerance:g}",
            "[green]pass[/green]" if c.passed else "[red]FAIL[/red]",
        )
    console.print(table)
    status = "[green]all clauses pass[/green]" if report.passed else "[red]some clauses failed[/red]"
    console.print(f"{status}  ({report.timings.get('total', 0.0):.2f}s)")


def _symbol(relation: str) -> str:
    return {"ge": ">=", "le": "<=", "eq": "=="}.get(relation, relation)


def _fmt(value: Any) -> str:
    v = float(value)
    if np.isinf(v):
        return "inf"
    return f"{v:.6g}"


def _number(value: Any) -> Any:
    v = float(value)
    return "inf" if np.isinf(v) else v


def _default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)
