#!/usr/bin/env python3
"""
Configuration management for fhclab.

Handles loading, merging and validating YAML configuration files, and
turns the validated values into weights, spaces and targets.
"""

import logging
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .errors import ConfigError, LabError
from .gridfn import GridFunction, SpaceSpec, parse_step
from .weights import Weight


@dataclass
class Tolerances:
    """Numerical tolerances recorded in every report."""
    slack_constant: float = 32.0
    divergence_threshold: float = 1e12
    liminf_tol: float = 1e-8
    limit_floor: float = 1.0
    unbounded_threshold: float = 1e12
    tail_window: float = 100.0
    pettis_window: float = 24.0
    quadrature_nodes: int = 8
    workers: int = 1


@dataclass
class PeriodicSettings:
    """Periodic point construction: period t, averaging width delta, truncation K."""
    period: int = 5
    delta: str = "1/4"
    truncation: int = 10


@dataclass
class OrbitSettings:
    """Orbit scan: which level's target to track and the radius margin."""
    level: int = 1
    margin: float = 0.05


@dataclass
class LabConfig:
    """Laboratory configuration."""

    # Global settings
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Weight and space
    weight: Union[str, Dict[str, Any]] = "exponential:1"
    space: str = "lp"
    p: float = 1.0

    # Grid and horizons
    grid_step: str = "1/32"
    horizon: int = 2000
    levels: Optional[int] = None
    targets: List[Any] = field(default_factory=lambda: ["chi(0,1)"])

    # Orbit scans
    eps: Optional[float] = None
    step: str = "1/8"

    out: Optional[str] = None

    tolerances: Tolerances = field(default_factory=Tolerances)
    periodic: PeriodicSettings = field(default_factory=PeriodicSettings)
    orbit: OrbitSettings = field(default_factory=OrbitSettings)

    @property
    def resolution(self) -> int:
        return parse_step(self.grid_step)

    def build_weight(self) -> Weight:
        return Weight.from_descriptor(self.weight)

    def build_space(self) -> SpaceSpec:
        weight = self.build_weight()
        if self.space == "lp":
            return SpaceSpec.lp(weight, float(self.p))
        if self.space == "c0":
            return SpaceSpec.c0(weight)
        raise ConfigError(f"space must be 'lp' or 'c0', got {self.space!r}", field="space")

    def build_targets(self) -> List[GridFunction]:
        if not self.targets:
            raise ConfigError("at least one target is required", field="targets")
        resolution = self.resolution
        targets = [GridFunction.parse(t, resolution) for t in self.targets]
        if self.levels is not None:
            if self.levels > len(targets):
                raise ConfigError(f"{self.levels} levels requested but only {len(targets)} targets given",
                                  field="levels")
            targets = targets[:self.levels]
        return targets


def parse_time(raw: Any, field_name: str) -> float:
    """A time given as '1/8' or a number."""
    try:
        return float(Fraction(str(raw)))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse time {raw!r}", field=field_name)


_SECTIONS = {"tolerances": Tolerances, "periodic": PeriodicSettings, "orbit": OrbitSettings}
_VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class ConfigManager:
    """Manages configuration loading and validation."""

    DEFAULT_CONFIG_PATHS = [
        Path.home() / ".config" / "fhclab" / "config.yaml",
        Path.home() / ".fhclab.yaml",
        Path("config") / "default.yaml",
    ]

    def __init__(self, config_path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration manager.

        Args:
            config_path: Explicit path to configuration file
            overrides: Values that take precedence over the file (CLI flags)

        Raises:
            ConfigError: the file cannot be parsed or holds unknown keys
        """
        self.logger = logging.getLogger("fhclab.config")
        self.config_path = config_path
        self.config = self.load_config()
        if overrides:
            self.config = self._merge_config(self.config, {k: v for k, v in overrides.items() if v is not None})

    def load_config(self) -> LabConfig:
        """
        Load configuration from YAML file.

        Returns:
            LabConfig instance
        """
        config_data: Dict[str, Any] = {}
        config_file = self._find_config_file()

        if config_file:
            self.logger.info(f"Loading configuration from {config_file}")
            config_data = self._load_yaml_file(config_file)
        else:
            self.logger.info("No configuration file found, using defaults")

        config = LabConfig()
        if config_data:
            config = self._merge_config(config, config_data)
        return config

    def _find_config_file(self) -> Optional[Path]:
        """Find the configuration file to use."""
        if self.config_path:
            if self.config_path.exists():
                return self.config_path
            raise ConfigError(f"config file not found: {self.config_path}")

        for path in self.DEFAULT_CONFIG_PATHS:
            if path.exists():
                return path
        return None

    def _load_yaml_file(self, path: Path) -> Dict[str, Any]:
        """Load a YAML mapping, reporting the offending line on parse errors."""
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigError(f"YAML parse error in {path}: {getattr(e, 'problem', e)}", line=line) from e
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a mapping at top level")
        return data

    def _merge_config(self, base_config: LabConfig, data: Dict[str, Any]) -> LabConfig:
        """Merge loaded data into configuration."""
        known = {f.name for f in fields(LabConfig)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown configuration key {key!r}", field=key)
            if key in _SECTIONS:
                if not isinstance(value, dict):
                    raise ConfigError(f"'{key}' must be a mapping", field=key)
                section = getattr(base_config, key)
                section_fields = {f.name for f in fields(section)}
                for sub_key, sub_value in value.items():
                    if sub_key not in section_fields:
                        raise ConfigError(f"unknown key {sub_key!r}", field=f"{key}.{sub_key}")
                    setattr(section, sub_key, sub_value)
            elif key == "targets":
                base_config.targets = list(value) if isinstance(value, (list, tuple)) else [value]
            else:
                setattr(base_config, key, value)
        return base_config

    def save_config(self, path: Optional[Path] = None) -> bool:
        """
        Save current configuration to file.

        Args:
            path: Path to save to, uses default if None

        Returns:
            True if saved successfully
        """
        save_path = path or self.config_path or self.DEFAULT_CONFIG_PATHS[0]
        save_path.parent.mkdir(parents=True, exist_ok=True)
        config_dict = self._config_to_dict()

        try:
            with open(save_path, "w") as f:
                yaml.safe_dump(config_dict, f, default_flow_style=False, sort_keys=True)
            self.logger.info(f"Configuration saved to {save_path}")
            return True
        except OSError as e:
            self.logger.error(f"Failed to save configuration: {e}")
            return False

    def _config_to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return asdict(self.config)

    def validate_config(self) -> List[str]:
        """
        Validate current configuration.

        Returns:
            List of validation error messages
        """
        errors = []
        c = self.config

        if c.log_level not in _VALID_LOG_LEVELS:
            errors.append(f"Invalid log_level: {c.log_level}")
        if c.space not in ("lp", "c0"):
            errors.append(f"Invalid space: {c.space} (expected lp or c0)")
        if not isinstance(c.p, (int, float)) or c.p < 1:
            errors.append(f"Invalid p: {c.p} (must be >= 1)")
        if not isinstance(c.horizon, int) or c.horizon < 1:
            errors.append(f"Invalid horizon: {c.horizon}")
        if c.eps is not None and (not isinstance(c.eps, (int, float)) or c.eps <= 0):
            errors.append(f"Invalid eps: {c.eps}")

        checks = [
            ("weight", c.build_weight),
            ("grid_step", lambda: c.resolution),
            ("targets", c.build_targets),
            ("step", lambda: parse_time(c.step, "step")),
            ("periodic.delta", lambda: parse_time(c.periodic.delta, "periodic.delta")),
        ]
        for name, check in checks:
            try:
                check()
            except (LabError, ValueError, TypeError) as e:
                errors.append(f"Invalid {name}: {e}")

        t = c.tolerances
        for name in ("slack_constant", "divergence_threshold", "liminf_tol", "limit_floor",
                     "unbounded_threshold", "pettis_window"):
            value = getattr(t, name)
            if not isinstance(value, (int, float)) or value <= 0:
                errors.append(f"Invalid tolerances.{name}: {value}")
        if not isinstance(t.tail_window, (int, float)) or t.tail_window < 0:
            errors.append(f"Invalid tolerances.tail_window: {t.tail_window}")
        for name in ("quadrature_nodes", "workers"):
            value = getattr(t, name)
            if not isinstance(value, int) or value < 1:
                errors.append(f"Invalid tolerances.{name}: {value}")

        if not isinstance(c.periodic.period, int) or c.periodic.period < 1:
            errors.append(f"Invalid periodic.period: {c.periodic.period}")
        if not isinstance(c.periodic.truncation, int) or c.periodic.truncation < 0:
            errors.append(f"Invalid periodic.truncation: {c.periodic.truncation}")
        beyond = bool(c.targets) and isinstance(c.orbit.level, int) and c.orbit.level > len(c.targets)
        if not isinstance(c.orbit.level, int) or c.orbit.level < 1 or beyond:
            errors.append(f"Invalid orbit.level: {c.orbit.level}")
        if not isinstance(c.orbit.margin, (int, float)) or c.orbit.margin < 0:
            errors.append(f"Invalid orbit.margin: {c.orbit.margin}")

        return errors
