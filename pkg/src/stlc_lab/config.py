"""
Configuration management for stlc-lab.

Handles loading and managing configuration from defaults, a YAML file,
environment variables and command-line options (in increasing priority).
"""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .core.errors import InputError
from .reach.steering import SteerOptions

logger = logging.getLogger(__name__)


@dataclass
class IntegratorConfig:
    step: float = 1e-3
    blowup_cap: float = 1e6
    # Replay invariants and noise floors are stated relative to this.
    tolerance: float = 1e-9


@dataclass
class SeminormConfig:
    grid: int = 11
    weight_ratio: float = 0.5


@dataclass
class PicardConfig:
    noise_floor: float = 1e-13
    slope_tolerance: float = 0.15


@dataclass
class ReachConfig:
    mode: str = "bang-bang"
    samples: int = 2000
    segments: int = 4
    directions: int = 64
    delta: float = 0.05
    duration_scale: float = 0.99
    coverage_threshold: float = 0.95


@dataclass
class SteerConfig:
    restarts: int = 4
    maxiter: int = 2000
    xatol: float = 1e-6
    fatol: float = 1e-12
    warm_samples: int = 256
    stop_tolerance: float = 0.0


@dataclass
class VariationConfig:
    rho: float = 0.1
    slope_margin: float = 0.5
    floor: float = 1e-3
    scale: float = 0.05


@dataclass
class PerturbConfig:
    targets: int = 20
    noise_factor: float = 10.0
    min_degree_offset: int = 1
    max_degree_offset: int = 3


@dataclass
class StlcLabConfig:
    """Main configuration for stlc-lab."""

    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    seminorm: SeminormConfig = field(default_factory=SeminormConfig)
    picard: PicardConfig = field(default_factory=PicardConfig)
    reach: ReachConfig = field(default_factory=ReachConfig)
    steer: SteerConfig = field(default_factory=SteerConfig)
    variation: VariationConfig = field(default_factory=VariationConfig)
    perturb: PerturbConfig = field(default_factory=PerturbConfig)

    # Thread cap for independent tasks
    jobs: int = 1

    def steer_options(self) -> SteerOptions:
        """Steering budget assembled from the reach, steer and integrator sections."""
        return SteerOptions(
            segments=self.reach.segments,
            restarts=self.steer.restarts,
            maxiter=self.steer.maxiter,
            xatol=self.steer.xatol,
            fatol=self.steer.fatol,
            warm_samples=self.steer.warm_samples,
            stop_tolerance=self.steer.stop_tolerance,
            duration_scale=self.reach.duration_scale,
            step=self.integrator.step,
            blowup_cap=self.integrator.blowup_cap,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# Environment variable -> (section, key, type); section None means top level
ENV_OVERRIDES = {
    "STLC_LAB_STEP": ("integrator", "step", float),
    "STLC_LAB_BLOWUP_CAP": ("integrator", "blowup_cap", float),
    "STLC_LAB_JOBS": (None, "jobs", int),
    "STLC_LAB_DELTA": ("reach", "delta", float),
    "STLC_LAB_MODE": ("reach", "mode", str),
}


class ConfigManager:
    """Manages stlc-lab configuration from multiple sources."""

    def __init__(self, config_file: Optional[Path] = None):
        self.config_dir = Path.home() / ".stlc-lab"
        self.config_file = config_file or self.config_dir / "config.yaml"
        self._config: Optional[StlcLabConfig] = None

    def load_config(self) -> StlcLabConfig:
        """Load configuration from all sources."""
        if self._config:
            return self._config

        config = StlcLabConfig()

        if self.config_file.exists():
            file_config = self._load_from_file()
            config = self._merge_configs(config, file_config)

        env_config = self._load_from_env()
        config = self._merge_configs(config, env_config)

        self._config = config
        return config

    def _load_from_file(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning("Could not load config file %s: %s", self.config_file, e)
            return {}
        if not isinstance(data, dict):
            logger.warning("Ignoring config file %s: top level is not a mapping", self.config_file)
            return {}
        return data

    def _load_from_env(self) -> Dict[str, Any]:
        """Load configuration from environment variables."""
        env_config: Dict[str, Any] = {}
        for name, (section, key, kind) in ENV_OVERRIDES.items():
            raw = os.getenv(name)
            if not raw:
                continue
            try:
                value = kind(raw)
            except ValueError:
                logger.warning("Ignoring %s=%r: expected %s", name, raw, kind.__name__)
                continue
            if section is None:
                env_config[key] = value
            else:
                env_config.setdefault(section, {})[key] = value
        return env_config

    def _merge_configs(self, base: StlcLabConfig, override: Dict[str, Any]) -> StlcLabConfig:
        """Merge a nested override mapping into ``base``; unknown keys are rejected."""
        _merge_into(base, override, "")
        return base

    def save_config(self, config: StlcLabConfig) -> None:
        """Save configuration to file."""
        self.config_file.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(self.config_file, "w", encoding="utf-8") as f:
                yaml.safe_dump(config.to_dict(), f, default_flow_style=False, indent=2)
        except OSError as e:
            logger.warning("Could not save config file %s: %s", self.config_file, e)

    def create_default_config(self) -> Path:
        """Create a default configuration file."""
        self.save_config(StlcLabConfig())
        logger.info("Created default configuration at %s", self.config_file)
        return self.config_file

    def get_config_info(self) -> Dict[str, Any]:
        """Get information about current configuration."""
        config = self.load_config()
        return {
            "config_file": str(self.config_file),
            "config_exists": self.config_file.exists(),
            "env_overrides": sorted(name for name in ENV_OVERRIDES if os.getenv(name)),
            "config": config.to_dict(),
        }


def _merge_into(target: Any, override: Dict[str, Any], prefix: str) -> None:
    known = {f.name: f for f in fields(target)}
    for key, value in override.items():
        path = f"{prefix}{key}"
        if key not in known:
            raise InputError(f"Unknown configuration key '{path}'")
        current = getattr(target, key)
        if is_dataclass(current):
            if not isinstance(value, dict):
                raise InputError(f"Configuration section '{path}' must be a mapping")
            _merge_into(current, value, f"{path}.")
            continue
        if isinstance(current, bool) or not isinstance(current, (int, float, str)):
            setattr(target, key, value)
            continue
        try:
            setattr(target, key, type(current)(value))
        except (TypeError, ValueError) as e:
            raise InputError(f"Configuration key '{path}' expects {type(current).__name__}") from e


# Global config manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager(config_file: Optional[Path] = None) -> ConfigManager:
    """Get the global config manager instance, or a fresh one for ``config_file``."""
    global _config_manager
    if config_file is not None:
        _config_manager = ConfigManager(config_file)
    elif _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def load_config(config_file: Optional[Path] = None) -> StlcLabConfig:
    """Load the current configuration."""
    return get_config_manager(config_file).load_config()
