"""
Experiment Runner

Resolves a config to its command, times it, and writes the run artifacts:

    <out>/<name>.report.json    config echo, results, clauses, timestamp
    <out>/<name>.summary.csv    one row per verified clause
    <out>/<name>.timings.json   wall-clock timings
    <out>/<name>.*.csv|json     command-specific sidecars

The report JSON is identical across reruns apart from its timestamp;
timings live in their own file.
"""
import json
import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np

from config import get_config
from errors import ConfigError
from .base_command import CommandRegistry
from .commands import build_registry
from .report import RunReport
from .schema import ExperimentConfig

logger = logging.getLogger(__name__)

_registry: Optional[CommandRegistry] = None


def get_registry() -> CommandRegistry:
    global _registry
    if _registry is None:
        _registry = build_registry()
    return _registry


def run(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    registry: Optional[CommandRegistry] = None,
) -> RunReport:
    """Execute one experiment and write its report; errors propagate to the caller"""
    registry = registry or get_registry()
    command = registry.get(config.command.value)
    if command is None:
        raise ConfigError(f"no command registered for '{config.command.value}'", path="command")
    command.validate(config)

    out = Path(out_dir if out_dir is not None else config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {out}: {e}", path="output_dir") from e

    # commands draw randomness from config.seed only; legacy global state is pinned too
    np.random.seed(config.seed % 2 ** 32)
    logger.info("running %s '%s' (seed %d)", command.name, config.name, config.seed)
    start = time.perf_counter()
    outcome = command.execute(config, out)
    elapsed = time.perf_counter() - start

    settings = get_config()
    report = RunReport(
        config=config.echo(),
        results=outcome.results,
        clauses=outcome.clauses,
        timings={"execute": elapsed},
        sidecars=[p.name for p in outcome.sidecars],
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        tool=f"{settings.app_name} {settings.version}",
    )
    summary = report.write_summary_csv(out / f"{config.name}.summary.csv")
    report.sidecars.append(summary.name)
    report.timings["total"] = time.perf_counter() - start

    report.to_json(out / f"{config.name}.report.json", include_timings=False)
    (out / f"{config.name}.timings.json").write_text(json.dumps(report.timings, indent=2, sort_keys=True) + "\n")

    failed = [c.name for c in report.clauses if not c.passed]
    if failed:
        logger.warning("%d of %d clauses failed: %s", len(failed), len(report.clauses), ", ".join(failed))
    else:
        logger.info("%d clauses pass in %.2fs", len(report.clauses), report.timings["total"])
    return report
