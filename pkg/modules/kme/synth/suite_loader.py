"""
Synthetic Suite Loader

Loads the entropy-sample distribution list and the random-walk grid from
config/suites.yaml and converts them to DistributionSpec objects.
"""

import os
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from ..core.errors import InvalidDistributionError
from .distributions import (
    DistributionKind,
    DistributionSpec,
    gaussian,
    gaussian_mixture,
    random_walk,
    uniform_box,
)

logger = logging.getLogger(__name__)


KIND_MAPPING = {kind.value: kind for kind in DistributionKind}


@dataclass
class WalkGrid:
    """Random-walk sweep: one walk per (dim, sigma)."""
    dims: List[int]
    sigmas: List[float]
    steps: int
    stationary: bool = False
    rho: float = 0.99

    def specs(self) -> List[DistributionSpec]:
        return [
            random_walk(sigma, d, self.steps, self.stationary, self.rho, name=f"walk_d{d}_s{sigma:g}")
            for d in self.dims
            for sigma in self.sigmas
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': list(self.dims),
            'sigmas': list(self.sigmas),
            'steps': self.steps,
            'stationary': self.stationary,
            'rho': self.rho,
        }


def default_sample_suite() -> List[DistributionSpec]:
    """In-code copy of the six-distribution suite (used when the YAML is absent)."""
    mix = 0.012
    return [
        uniform_box([-0.5, -0.5], [0.5, 0.5], name="U2"),
        gaussian_mixture(
            [(0.25, (-0.25, -0.25), mix), (0.25, (-0.25, 0.25), mix),
             (0.25, (0.25, -0.25), mix), (0.25, (0.25, 0.25), mix)],
            name="4N",
        ),
        gaussian_mixture([(0.5, (-0.25, 0.0), mix), (0.5, (0.25, 0.0), mix)], name="2N"),
        gaussian((0.0, 0.0), 0.02, name="N(0.02)"),
        gaussian((0.0, 0.0), 0.01, name="N(0.01)"),
        gaussian((0.0, 0.0), 0.005, name="N(0.005)"),
    ]


def default_walk_grid() -> WalkGrid:
    return WalkGrid(dims=[2, 4, 64], sigmas=[0.01, 0.1, 1.0], steps=100_000)


def _resolve_suites_path(config_path: Optional[Path] = None) -> Path:
    """
    Resolve the suites file path.

    Priority:
    1. Explicit config_path parameter
    2. KME_SUITES_CONFIG environment variable
    3. Default: config/suites.yaml (relative to project root)
    """
    if config_path:
        return Path(config_path)

    env_path = os.getenv('KME_SUITES_CONFIG')
    if env_path:
        return Path(env_path)

    project_root = Path(__file__).parent.parent.parent.parent
    return project_root / 'config' / 'suites.yaml'


def _validate_kind(kind_str: Any, name: str) -> DistributionKind:
    """
    Raises:
        InvalidDistributionError: If kind is not a known distribution kind
    """
    if kind_str not in KIND_MAPPING:
        valid_kinds = ', '.join(KIND_MAPPING.keys())
        raise InvalidDistributionError(
            f"Invalid kind '{kind_str}' for distribution '{name}'. Valid values: {valid_kinds}"
        )
    return KIND_MAPPING[kind_str]


def _build_distribution(entry: Dict[str, Any], idx: int) -> DistributionSpec:
    """
    Build a DistributionSpec from one YAML entry.

    Raises:
        InvalidDistributionError: If required fields are missing or invalid
    """
    name = entry.get('name') or f"dist{idx}"
    kind = _validate_kind(entry.get('kind'), name)

    try:
        if kind is DistributionKind.UNIFORM_BOX:
            return uniform_box(entry['lower'], entry['upper'], name=name)
        if kind is DistributionKind.GAUSSIAN:
            return gaussian(entry['mean'], entry['sigma2'], name=name)
        if kind is DistributionKind.GAUSSIAN_MIXTURE:
            components = entry.get('components')
            if not components or not isinstance(components, list):
                raise InvalidDistributionError(f"Distribution '{name}' needs a 'components' list")
            return gaussian_mixture(
                [(c['weight'], c['mean'], c['sigma2']) for c in components], name=name
            )
        return random_walk(
            entry['sigma'], entry['d'], entry.get('steps', 0),
            entry.get('stationary', False), entry.get('rho', 0.99), name=name,
        )
    except KeyError as e:
        raise InvalidDistributionError(f"Distribution '{name}' missing required field {e}")


def _load_yaml(config_file: Path) -> Optional[Dict[str, Any]]:
    if not config_file.exists():
        return None
    try:
        with open(config_file, 'r') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise InvalidDistributionError(f"Failed to parse YAML file {config_file}: {e}")
    if data is not None and not isinstance(data, dict):
        raise InvalidDistributionError(f"Invalid YAML structure in {config_file}: expected a dictionary")
    return data or {}


def load_sample_suite(
    config_path: Optional[Path] = None,
    fallback_to_defaults: bool = True
) -> List[DistributionSpec]:
    """
    Load the entropy-sample distributions, in their declared (decreasing entropy) order.

    Raises:
        FileNotFoundError: If the file is missing and fallback_to_defaults=False
        InvalidDistributionError: If an entry is invalid or names repeat
    """
    config_file = _resolve_suites_path(config_path)
    data = _load_yaml(config_file)
    if data is None:
        if fallback_to_defaults:
            logger.warning(f"⚠️  Suites config not found at {config_file}. Using in-code defaults.")
            return default_sample_suite()
        raise FileNotFoundError(
            f"Suites configuration file not found: {config_file}. "
            f"Create the file or set KME_SUITES_CONFIG environment variable."
        )

    entries = data.get('entropy_sample')
    if not entries:
        logger.warning(f"⚠️  No entropy_sample suite in {config_file}, using defaults")
        return default_sample_suite()
    if not isinstance(entries, list):
        raise InvalidDistributionError(f"Invalid 'entropy_sample' field in {config_file}: expected a list")

    suite = []
    seen_names = set()
    for idx, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise InvalidDistributionError(
                f"Invalid distribution entry at index {idx} in {config_file}: expected a dictionary"
            )
        spec = _build_distribution(entry, idx)
        if spec.label in seen_names:
            raise InvalidDistributionError(f"Duplicate distribution name '{spec.label}' in {config_file}")
        seen_names.add(spec.label)
        suite.append(spec)

    logger.info(f"✅ Loaded {len(suite)} distributions from {config_file}")
    return suite


def load_walk_grid(config_path: Optional[Path] = None) -> WalkGrid:
    """
    Load the random-walk grid, falling back to dims {2,4,64} x sigmas {0.01,0.1,1}.

    Raises:
        InvalidDistributionError: If dims or sigmas are empty or invalid
    """
    config_file = _resolve_suites_path(config_path)
    data = _load_yaml(config_file)
    block = (data or {}).get('entropy_walk')
    if not block:
        return default_walk_grid()

    defaults = default_walk_grid()
    grid = WalkGrid(
        dims=[int(d) for d in block.get('dims', defaults.dims)],
        sigmas=[float(s) for s in block.get('sigmas', defaults.sigmas)],
        steps=int(block.get('steps', defaults.steps)),
        stationary=bool(block.get('stationary', False)),
        rho=float(block.get('rho', 0.99)),
    )
    if not grid.dims or not grid.sigmas:
        raise InvalidDistributionError(f"entropy_walk in {config_file} needs non-empty dims and sigmas")
    grid.specs()  # validates every (dim, sigma) pair
    return grid


def select_distributions(suite: List[DistributionSpec], names: Optional[List[str]]) -> List[DistributionSpec]:
    """
    Subset of the suite by name, keeping suite order.

    Raises:
        InvalidDistributionError: If a requested name is not in the suite
    """
    if not names:
        return suite
    by_name = {spec.label: spec for spec in suite}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise InvalidDistributionError(
            f"Unknown distribution(s) {missing}. Available: {', '.join(by_name)}"
        )
    wanted = set(names)
    return [spec for spec in suite if spec.label in wanted]
