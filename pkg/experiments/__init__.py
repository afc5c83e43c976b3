"""
Experiments Module

Batch driver: validated experiment configs, the command registry, the
runner and its reports.
"""
from .base_command import BaseCommand, CommandOutcome, CommandRegistry
from .commands import (
    DensityCommand,
    GaborCommand,
    LocalizeCommand,
    SelectCommand,
    VerifyCommand,
    build_registry,
)
from .report import Clause, RunReport, render_summary
from .runner import get_registry, run
from .schema import Command, ExperimentConfig, RunParams, load_config, parse_config

__all__ = [
    "BaseCommand",
    "CommandOutcome",
    "CommandRegistry",
    "DensityCommand",
    "GaborCommand",
    "LocalizeCommand",
    "SelectCommand",
    "VerifyCommand",
    "build_registry",
    "Clause",
    "RunReport",
    "render_summary",
    "get_registry",
    "run",
    "Command",
    "ExperimentConfig",
    "RunParams",
    "load_config",
    "parse_config",
]
