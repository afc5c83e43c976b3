"""
Base Command Framework

Every CLI command implements ``BaseCommand.execute`` and is looked up by name
in a ``CommandRegistry``.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from errors import ConfigError
from .report import Clause
from .schema import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass
class CommandOutcome:
    """Payload of one command run, before it is wrapped in a RunReport"""
    results: Dict[str, Any] = field(default_factory=dict)
    clauses: List[Clause] = field(default_factory=list)
    sidecars: List[Path] = field(default_factory=list)


class BaseCommand(ABC):
    """
    A named experiment type.

    ``fixtures`` lists the built-in instances the command can run without
    input files; ``inputs`` names the input keys it accepts instead.
    """
    name: str = "base"
    description: str = ""
    fixtures: Tuple[str, ...] = ()
    inputs: Tuple[str, ...] = ()

    @abstractmethod
    def execute(self, config: ExperimentConfig, out_dir: Path) -> CommandOutcome:
        pass

    def validate(self, config: ExperimentConfig) -> None:
        """Reject fixtures and input keys the command does not know"""
        if config.fixture is not None and config.fixture not in self.fixtures:
            raise ConfigError(
                f"command '{self.name}' has no fixture '{config.fixture}' (known: {', '.join(self.fixtures)})",
                path="fixture",
            )
        unknown = sorted(set(config.inputs) - set(self.inputs))
        if unknown:
            raise ConfigError(f"command '{self.name}' does not read inputs {unknown}", path=f"inputs.{unknown[0]}")
        if config.fixture is None and not config.inputs:
            if not self.fixtures:
                raise ConfigError(f"command '{self.name}' needs input files", path="inputs")

    def default_fixture(self, config: ExperimentConfig) -> Optional[str]:
        if config.fixture is not None:
            return config.fixture
        return None if config.inputs else (self.fixtures[0] if self.fixtures else None)

    def get_status(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "fixtures": list(self.fixtures),
            "inputs": list(self.inputs),
        }


class CommandRegistry:
    """
    Registry for the CLI commands.
    """

    def __init__(self):
        self._commands: Dict[str, BaseCommand] = {}

    def register(self, command: BaseCommand):
        self._commands[command.name.lower()] = command

    def get(self, name: str) -> Optional[BaseCommand]:
        return self._commands.get(name.lower())

    def list_commands(self) -> List[Dict[str, Any]]:
        return [c.get_status() for c in self._commands.values()]

    def find_command_for_fixture(self, fixture: str) -> Optional[BaseCommand]:
        for command in self._commands.values():
            if fixture in command.fixtures:
                return command
        return None
