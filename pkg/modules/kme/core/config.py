"""
KME Configuration

Configuration classes and constants for the reward engine and the exploration
harness. Defaults are loaded from config/kme.yaml (or the KME_CONFIG env var);
a handful of fields can be overridden from the environment.
"""

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple
import logging
import math
import os

import yaml
from dotenv import load_dotenv

from .errors import InvalidHyperparameterError

logger = logging.getLogger(__name__)

load_dotenv()


class InitPolicy(Enum):
    """How cluster centers are initialized"""
    ZERO = "zero"
    FIRST_POINTS = "first_points"


class FChoice(Enum):
    """Transform applied to each weighted nearest distance in the objective"""
    LOG = "log"
    SQRT = "sqrt"


# ===== DEFAULTS LOADING =====
def _resolve_config_path() -> Path:
    """KME_CONFIG env var first, then config/kme.yaml at the repository root."""
    config_path = Path(os.getenv('KME_CONFIG', 'config/kme.yaml'))
    if not config_path.is_absolute():
        config_path = Path(__file__).parent.parent.parent.parent / config_path
    return config_path


def _load_defaults_from_yaml() -> Dict[str, Dict[str, Any]]:
    """
    Load the engine and explore sections from the YAML config.

    Returns:
        Dict with 'engine' and 'explore' keys (empty dicts when unavailable)
    """
    config_path = _resolve_config_path()
    try:
        if not config_path.exists():
            logger.debug(f"KME config not found at {config_path}, using defaults")
            return {'engine': {}, 'explore': {}}

        with open(config_path, 'r') as f:
            data = yaml.safe_load(f)

        if not data or not isinstance(data, dict):
            logger.warning(f"KME config at {config_path} is empty, using defaults")
            return {'engine': {}, 'explore': {}}

        logger.debug(f"Loaded KME config from {config_path}")
        return {
            'engine': data.get('engine') or {},
            'explore': data.get('explore') or {},
        }

    except Exception as e:
        logger.warning(f"Failed to load KME config: {e}, using defaults")
        return {'engine': {}, 'explore': {}}


# Load defaults once at module import
_LOADED_DEFAULTS = _load_defaults_from_yaml()


def _default(section: str, key: str, fallback: Any, env: Optional[str] = None, cast=None) -> Any:
    """Resolve a default: environment variable, then YAML, then in-code fallback."""
    if env and os.getenv(env) is not None:
        raw = os.getenv(env)
        return cast(raw) if cast else raw
    value = _LOADED_DEFAULTS.get(section, {}).get(key, fallback)
    return cast(value) if cast and value is not None else value


def _env_default(key: str, fallback: Any) -> Any:
    """Default for the nested explore.env block."""
    env_block = _LOADED_DEFAULTS.get('explore', {}).get('env') or {}
    return env_block.get(key, fallback)


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidHyperparameterError(f"{name} must be finite (got {value})")


@dataclass
class KMEConfig:
    """Reward-engine hyperparameters shared by every command."""

    k: int = field(default_factory=lambda: _default('engine', 'k', 300, 'KME_K', int))
    alpha: float = field(default_factory=lambda: _default('engine', 'alpha', 0.05, 'KME_ALPHA', float))
    kappa: float = field(default_factory=lambda: _default('engine', 'kappa', 1e-4, 'KME_KAPPA', float))
    f: FChoice = field(default_factory=lambda: _default('engine', 'f', 'sqrt'))
    log_floor: float = field(default_factory=lambda: _default('engine', 'log_floor', 1e-12, cast=float))
    init: InitPolicy = field(default_factory=lambda: _default('engine', 'init', 'zero'))

    # Fraction of clusters that must be rescanned for an update to count as pathological
    pathological_threshold: float = field(
        default_factory=lambda: _default('engine', 'pathological_threshold', 0.10, cast=float)
    )

    def __post_init__(self):
        self.f = _parse_enum(FChoice, self.f, 'f')
        self.init = _parse_enum(InitPolicy, self.init, 'init')
        validate_engine_hyperparameters(self.k, self.alpha, self.kappa)
        _require_finite('log_floor', self.log_floor)
        if self.log_floor <= 0:
            raise InvalidHyperparameterError(f"log_floor must be > 0 (got {self.log_floor})")
        if not 0.0 <= self.pathological_threshold <= 1.0:
            raise InvalidHyperparameterError(
                f"pathological_threshold must be in [0, 1] (got {self.pathological_threshold})"
            )

    def to_dict(self) -> Dict[str, Any]:
        """Plain-JSON view (enums as their values)."""
        data = asdict(self)
        data['f'] = self.f.value
        data['init'] = self.init.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'KMEConfig':
        _reject_unknown_keys(cls, data, 'engine')
        return cls(**data)


@dataclass
class EnvConfig:
    """SparseBoxEnv parameters."""

    dim: int = field(default_factory=lambda: int(_env_default('dim', 2)))
    goal: Tuple[float, ...] = field(default_factory=lambda: tuple(_env_default('goal', (0.9, 0.9))))
    goal_radius: float = field(default_factory=lambda: float(_env_default('goal_radius', 0.1)))
    max_episode_steps: int = field(default_factory=lambda: int(_env_default('max_episode_steps', 64)))
    max_speed: float = field(default_factory=lambda: float(_env_default('max_speed', 0.05)))

    def __post_init__(self):
        self.goal = tuple(float(g) for g in self.goal)
        if self.dim < 1:
            raise InvalidHyperparameterError(f"env dim must be >= 1 (got {self.dim})")
        if len(self.goal) != self.dim:
            raise InvalidHyperparameterError(
                f"env goal has {len(self.goal)} coordinates, expected dim={self.dim}"
            )
        if self.goal_radius <= 0 or self.max_speed <= 0:
            raise InvalidHyperparameterError("goal_radius and max_speed must be > 0")
        if self.max_episode_steps < 1:
            raise InvalidHyperparameterError(
                f"max_episode_steps must be >= 1 (got {self.max_episode_steps})"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EnvConfig':
        _reject_unknown_keys(cls, data, 'env')
        return cls(**data)


@dataclass
class ExploreConfig:
    """Configuration for the on-policy exploration loop."""

    # B, environment steps collected per batch
    batch_size: int = field(
        default_factory=lambda: _default('explore', 'batch_size', 2048, 'KME_BATCH_SIZE', int)
    )
    beta: float = field(default_factory=lambda: _default('explore', 'beta', 0.01, 'KME_BETA', float))
    gamma: float = field(default_factory=lambda: _default('explore', 'gamma', 0.99, cast=float))
    t_max: int = field(default_factory=lambda: _default('explore', 't_max', 200, cast=int))
    seed: int = field(default_factory=lambda: _default('explore', 'seed', 0, cast=int))

    # Cross-entropy method
    population: int = field(default_factory=lambda: _default('explore', 'population', 32, cast=int))
    elite_fraction: float = field(default_factory=lambda: _default('explore', 'elite_fraction', 0.25, cast=float))
    init_std: float = field(default_factory=lambda: _default('explore', 'init_std', 0.005, cast=float))
    extra_std: float = field(default_factory=lambda: _default('explore', 'extra_std', 0.0, cast=float))

    cells_per_axis: int = field(default_factory=lambda: _default('explore', 'cells_per_axis', 20, cast=int))
    checkpoint_frequency: int = field(
        default_factory=lambda: _default('explore', 'checkpoint_frequency', 10, cast=int)
    )

    env: EnvConfig = field(default_factory=EnvConfig)
    engine: KMEConfig = field(default_factory=KMEConfig)

    def __post_init__(self):
        if isinstance(self.env, dict):
            self.env = EnvConfig.from_dict(self.env)
        if isinstance(self.engine, dict):
            self.engine = KMEConfig.from_dict(self.engine)
        if self.batch_size < 1:
            raise InvalidHyperparameterError(f"batch_size (B) must be >= 1 (got {self.batch_size})")
        _require_finite('beta', self.beta)
        if self.beta < 0:
            raise InvalidHyperparameterError(f"beta must be >= 0 (got {self.beta})")
        if not 0.0 < self.gamma <= 1.0:
            raise InvalidHyperparameterError(f"gamma must be in (0, 1] (got {self.gamma})")
        if self.t_max < 0:
            raise InvalidHyperparameterError(f"t_max must be >= 0 (got {self.t_max})")
        if self.population < 2:
            raise InvalidHyperparameterError(f"population must be >= 2 (got {self.population})")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise InvalidHyperparameterError(
                f"elite_fraction must be in (0, 1] (got {self.elite_fraction})"
            )
        if self.init_std <= 0 or self.extra_std < 0:
            raise InvalidHyperparameterError("init_std must be > 0 and extra_std >= 0")
        if self.cells_per_axis < 1:
            raise InvalidHyperparameterError(f"cells_per_axis must be >= 1 (got {self.cells_per_axis})")
        if self.checkpoint_frequency < 1:
            raise InvalidHyperparameterError(
                f"checkpoint_frequency must be >= 1 (got {self.checkpoint_frequency})"
            )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['env']['goal'] = list(self.env.goal)
        data['engine'] = self.engine.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExploreConfig':
        _reject_unknown_keys(cls, data, 'explore')
        return cls(**data)


# ===== HELPERS =====

def validate_engine_hyperparameters(k: int, alpha: float, kappa: float) -> None:
    """
    Validate the clustering hyperparameters.

    Raises:
        InvalidHyperparameterError: If k < 2, alpha outside (0, 1), kappa < 0
            or any value is not finite
    """
    if int(k) != k or k < 2:
        raise InvalidHyperparameterError(
            f"k must be an integer >= 2 (got {k}); the nearest-other-cluster objective "
            f"is undefined for a single cluster"
        )
    _require_finite('alpha', alpha)
    _require_finite('kappa', kappa)
    if not 0.0 < alpha < 1.0:
        raise InvalidHyperparameterError(f"alpha must be in (0, 1) (got {alpha})")
    if kappa < 0:
        raise InvalidHyperparameterError(f"kappa must be >= 0 (got {kappa})")


def _parse_enum(enum_cls, value, name: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).lower())
    except ValueError:
        valid = ', '.join(member.value for member in enum_cls)
        raise InvalidHyperparameterError(f"Invalid {name} '{value}'. Valid values: {valid}")


def _reject_unknown_keys(cls, data: Dict[str, Any], section: str) -> None:
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidHyperparameterError(
            f"Unknown {section} config keys: {', '.join(unknown)}. "
            f"Valid keys: {', '.join(sorted(known))}"
        )


def load_explore_config(config_path: Path) -> ExploreConfig:
    """
    Load an ExploreConfig from a JSON or YAML file whose keys mirror its fields.

    Missing keys keep their defaults; unknown keys are rejected.

    Raises:
        FileNotFoundError: If the file does not exist
        InvalidHyperparameterError: If the file is not valid YAML or contains unknown or invalid values
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise FileNotFoundError(f"Explore config file not found: {config_path}")

    try:
        with open(config_path, 'r') as f:
            data = yaml.safe_load(f)  # YAML is a superset of JSON
    except yaml.YAMLError as e:
        raise InvalidHyperparameterError(f"Could not parse {config_path}: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise InvalidHyperparameterError(
            f"Invalid structure in {config_path}: expected a mapping of ExploreConfig fields"
        )

    logger.info(f"📖 Loaded explore config from {config_path}")
    return ExploreConfig.from_dict(data)
