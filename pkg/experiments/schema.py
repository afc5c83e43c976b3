"""
Experiment Configuration Schema

A run is described by one JSON document validated with pydantic. Relative
input paths resolve against the directory holding the config file.

Example:

    {
      "command": "select",
      "name": "duplicated-basis",
      "fixture": "duplicated_basis",
      "params": {"epsilon": 0.5, "size": 32},
      "seed": 7,
      "output_dir": "runs/duplicated"
    }
"""
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from errors import ConfigError
from selection.strategies import registry as strategy_registry

SEED_LIMIT = 2 ** 64


class Command(str, Enum):
    DENSITY = "density"
    LOCALIZE = "localize"
    SELECT = "select"
    GABOR = "gabor"
    VERIFY = "verify"


class RunParams(BaseModel):
    """Numerical parameters shared by all commands; each command reads what it needs"""
    model_config = ConfigDict(extra="forbid")

    epsilon: float = Field(0.5, gt=0, lt=1)
    delta: float = Field(0.5, gt=0, lt=1)
    r_max: int = Field(32, ge=1)
    strategy: str = "barrier"
    policy: Optional[str] = None  # each command has its own default
    mode: str = "exact_pattern"
    # fixture sizes
    size: int = Field(8, ge=1)
    window: int = Field(64, ge=1)
    n: int = Field(128, ge=4)
    h: Optional[int] = Field(None, ge=1)
    copies: int = Field(1, ge=1)
    # index-free densities and the divergence fixture
    radius: int = Field(512, ge=1)

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, v: str) -> str:
        return strategy_registry.get(v).name

    @field_validator("policy")
    @classmethod
    def _known_policy(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in ("strict", "window_fit"):
            raise ValueError(f"unknown policy '{v}'")
        return v

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, v: str) -> str:
        if v not in ("exact_pattern", "sweep"):
            raise ValueError(f"unknown density mode '{v}'")
        return v


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Command
    name: str = "run"
    fixture: Optional[str] = None
    inputs: Dict[str, str] = Field(default_factory=dict)
    params: RunParams = Field(default_factory=RunParams)
    seed: int = Field(0, ge=0, lt=SEED_LIMIT)
    output_dir: str = "runs"

    @field_validator("name")
    @classmethod
    def _safe_name(cls, v: str) -> str:
        if not v or any(ch in v for ch in "/\\"):
            raise ValueError("name must be a non-empty file stem")
        return v

    def input_path(self, key: str) -> Optional[Path]:
        value = self.inputs.get(key)
        return Path(value) if value else None

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _error_path(err: Dict[str, Any]) -> str:
    return ".".join(str(p) for p in err.get("loc", ()))


def parse_config(data: Dict[str, Any], base_dir: Optional[Path] = None) -> ExperimentConfig:
    """Validate a config mapping; schema errors become ConfigError with the field path"""
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = _error_path(first)
        raise ConfigError(f"invalid config at '{path}': {first.get('msg')}", path=path) from e
    if base_dir is not None:
        resolved = {k: str((base_dir / v) if not Path(v).is_absolute() else Path(v)) for k, v in cfg.inputs.items()}
        cfg = cfg.model_copy(update={"inputs": resolved})
    return cfg


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Read a JSON config; ``overrides`` replace top-level keys (CLI --seed, --out)"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e.msg} (line {e.lineno})") from e
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_config(data, base_dir=path.parent)
