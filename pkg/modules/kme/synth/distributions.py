"""
Synthetic Distributions

Seeded samplers, true densities and closed-form entropies for the uniform,
Gaussian, Gaussian-mixture and random-walk inputs of the entropy experiments.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from scipy.signal import lfilter
from scipy.special import logsumexp

from ..core.errors import InvalidDistributionError

logger = logging.getLogger(__name__)

MIXTURE_WEIGHT_TOLERANCE = 1e-12


class DistributionKind(Enum):
    """Supported synthetic distributions"""
    UNIFORM_BOX = "uniform_box"
    GAUSSIAN = "gaussian"
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    RANDOM_WALK = "random_walk"


@dataclass(frozen=True)
class MixtureComponent:
    """Isotropic Gaussian component of a mixture."""
    weight: float
    mean: Tuple[float, ...]
    sigma2: float


@dataclass(frozen=True)
class DistributionSpec:
    """
    Declarative description of a synthetic sampler.

    Build instances with uniform_box, gaussian, gaussian_mixture or random_walk;
    the constructor validates whichever fields the kind uses.
    """

    kind: DistributionKind
    d: int
    name: str = ""
    lower: Tuple[float, ...] = ()
    upper: Tuple[float, ...] = ()
    mean: Tuple[float, ...] = ()
    sigma2: float = 0.0
    components: Tuple[MixtureComponent, ...] = field(default_factory=tuple)

    # Random walk: per-coordinate increment std, default length and the AR(1) variant
    sigma: float = 0.0
    steps: int = 0
    stationary: bool = False
    rho: float = 0.99

    def __post_init__(self):
        if self.d < 1:
            raise InvalidDistributionError(f"d must be >= 1 (got {self.d})")
        validator = {
            DistributionKind.UNIFORM_BOX: self._validate_uniform,
            DistributionKind.GAUSSIAN: self._validate_gaussian,
            DistributionKind.GAUSSIAN_MIXTURE: self._validate_mixture,
            DistributionKind.RANDOM_WALK: self._validate_walk,
        }[self.kind]
        validator()

    def _validate_uniform(self):
        lower, upper = np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)
        if lower.shape != (self.d,) or upper.shape != (self.d,):
            raise InvalidDistributionError(f"uniform_box bounds must have {self.d} coordinates")
        if not np.all(lower < upper) or not np.all(np.isfinite(upper - lower)):
            raise InvalidDistributionError("uniform_box needs finite lower < upper on every axis")

    def _validate_gaussian(self):
        if len(self.mean) != self.d:
            raise InvalidDistributionError(f"gaussian mean must have {self.d} coordinates")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise InvalidDistributionError(f"sigma2 must be > 0 (got {self.sigma2})")

    def _validate_mixture(self):
        if not self.components:
            raise InvalidDistributionError("gaussian_mixture needs at least one component")
        for idx, comp in enumerate(self.components):
            if comp.weight <= 0:
                raise InvalidDistributionError(f"Mixture component {idx} has non-positive weight {comp.weight}")
            if len(comp.mean) != self.d:
                raise InvalidDistributionError(f"Mixture component {idx} mean must have {self.d} coordinates")
            if not (comp.sigma2 > 0 and math.isfinite(comp.sigma2)):
                raise InvalidDistributionError(f"Mixture component {idx} has invalid sigma2 {comp.sigma2}")
        total = math.fsum(c.weight for c in self.components)
        if abs(total - 1.0) > MIXTURE_WEIGHT_TOLERANCE:
            raise InvalidDistributionError(f"Mixture weights must sum to 1 (got {total!r})")

    def _validate_walk(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InvalidDistributionError(f"Walk sigma must be > 0 (got {self.sigma})")
        if self.steps < 0:
            raise InvalidDistributionError(f"Walk steps must be >= 0 (got {self.steps})")
        if self.stationary and not 0.0 <= self.rho < 1.0:
            raise InvalidDistributionError(f"Stationary walk needs rho in [0, 1) (got {self.rho})")

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    def to_dict(self):
        data = {'name': self.label, 'kind': self.kind.value, 'd': self.d}
        if self.kind is DistributionKind.UNIFORM_BOX:
            data.update(lower=list(self.lower), upper=list(self.upper))
        elif self.kind is DistributionKind.GAUSSIAN:
            data.update(mean=list(self.mean), sigma2=self.sigma2)
        elif self.kind is DistributionKind.GAUSSIAN_MIXTURE:
            data['components'] = [
                {'weight': c.weight, 'mean': list(c.mean), 'sigma2': c.sigma2} for c in self.components
            ]
        else:
            data.update(sigma=self.sigma, steps=self.steps, stationary=self.stationary)
            if self.stationary:
                data['rho'] = self.rho
        return data


# ===== CONSTRUCTORS =====

def uniform_box(lower, upper, name: str = "") -> DistributionSpec:
    lower = tuple(float(v) for v in np.atleast_1d(lower))
    upper = tuple(float(v) for v in np.atleast_1d(upper))
    return DistributionSpec(DistributionKind.UNIFORM_BOX, len(lower), name=name, lower=lower, upper=upper)


def gaussian(mean, sigma2: float, name: str = "") -> DistributionSpec:
    mean = tuple(float(v) for v in np.atleast_1d(mean))
    return DistributionSpec(DistributionKind.GAUSSIAN, len(mean), name=name, mean=mean, sigma2=float(sigma2))


def gaussian_mixture(components: List[Tuple[float, object, float]], name: str = "") -> DistributionSpec:
    """components: (weight, mean, sigma2) triples."""
    parts = tuple(
        MixtureComponent(float(w), tuple(float(v) for v in np.atleast_1d(m)), float(s2))
        for w, m, s2 in components
    )
    d = len(parts[0].mean) if parts else 0
    return DistributionSpec(DistributionKind.GAUSSIAN_MIXTURE, max(d, 1), name=name, components=parts)


def random_walk(
    sigma: float,
    d: int,
    steps: int,
    stationary: bool = False,
    rho: float = 0.99,
    name: str = ""
) -> DistributionSpec:
    return DistributionSpec(
        DistributionKind.RANDOM_WALK, int(d), name=name,
        sigma=float(sigma), steps=int(steps), stationary=bool(stationary), rho=float(rho),
    )


# ===== SAMPLING =====

def sample(spec: DistributionSpec, n: Optional[int] = None, seed: int = 0) -> np.ndarray:
    """
    Draw n points (n x d) deterministically from seed.

    For random walks n defaults to spec.steps and the rows are x_1..x_n of the
    trajectory started at x_0 = 0.

    Raises:
        InvalidDistributionError: If n < 1 (or missing for a non-walk spec)
    """
    if n is None:
        if spec.kind is not DistributionKind.RANDOM_WALK:
            raise InvalidDistributionError(f"n is required for {spec.kind.value} samples")
        n = spec.steps
    if n < 1:
        raise InvalidDistributionError(f"n must be >= 1 (got {n})")

    rng = np.random.default_rng(seed)
    d = spec.d

    if spec.kind is DistributionKind.UNIFORM_BOX:
        lower, upper = np.asarray(spec.lower), np.asarray(spec.upper)
        return lower + (upper - lower) * rng.random((n, d))

    if spec.kind is DistributionKind.GAUSSIAN:
        return np.asarray(spec.mean) + math.sqrt(spec.sigma2) * rng.standard_normal((n, d))

    if spec.kind is DistributionKind.GAUSSIAN_MIXTURE:
        # Noise first, so a one-component mixture follows the Gaussian seed path exactly
        z = rng.standard_normal((n, d))
        means = np.array([c.mean for c in spec.components])
        scales = np.sqrt([c.sigma2 for c in spec.components])
        if len(spec.components) == 1:
            return means[0] + scales[0] * z
        weights = np.array([c.weight for c in spec.components])
        idx = rng.choice(len(spec.components), size=n, p=weights / weights.sum())
        return means[idx] + scales[idx][:, np.newaxis] * z

    increments = spec.sigma * rng.standard_normal((n, d))
    if spec.stationary:
        # x_{t+1} = rho * x_t + sqrt(1 - rho^2) * xi_t, stationary law N(0, sigma^2 I)
        return lfilter([math.sqrt(1.0 - spec.rho ** 2)], [1.0, -spec.rho], increments, axis=0)
    return np.cumsum(increments, axis=0)


# ===== DENSITIES AND ENTROPIES =====

def _gaussian_log_pdf(X: np.ndarray, mean, sigma2: float) -> np.ndarray:
    d = X.shape[1]
    sq = np.sum((X - np.asarray(mean)) ** 2, axis=1)
    return -0.5 * d * math.log(2.0 * math.pi * sigma2) - sq / (2.0 * sigma2)


def log_pdf(spec: DistributionSpec, X) -> np.ndarray:
    """
    Log density at each row of X (-inf outside a uniform box).

    Raises:
        InvalidDistributionError: For an unbounded random walk (no marginal density)
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, spec.d)

    if spec.kind is DistributionKind.UNIFORM_BOX:
        lower, upper = np.asarray(spec.lower), np.asarray(spec.upper)
        inside = np.all((X >= lower) & (X <= upper), axis=1)
        return np.where(inside, -math.log(float(np.prod(upper - lower))), -np.inf)

    if spec.kind is DistributionKind.GAUSSIAN:
        return _gaussian_log_pdf(X, spec.mean, spec.sigma2)

    if spec.kind is DistributionKind.GAUSSIAN_MIXTURE:
        parts = np.stack([
            math.log(c.weight) + _gaussian_log_pdf(X, c.mean, c.sigma2) for c in spec.components
        ])
        return logsumexp(parts, axis=0)

    if spec.stationary:
        return _gaussian_log_pdf(X, np.zeros(spec.d), spec.sigma ** 2)
    raise InvalidDistributionError("An unbounded random walk has no stationary density")


def pdf(spec: DistributionSpec, X) -> np.ndarray:
    return np.exp(log_pdf(spec, X))


def true_entropy(spec: DistributionSpec) -> Optional[float]:
    """
    Closed-form differential entropy in nats, or None when no closed form exists.
    """
    if spec.kind is DistributionKind.UNIFORM_BOX:
        return float(np.sum(np.log(np.asarray(spec.upper) - np.asarray(spec.lower))))
    if spec.kind is DistributionKind.GAUSSIAN:
        return 0.5 * spec.d * math.log(2.0 * math.pi * math.e * spec.sigma2)
    if spec.kind is DistributionKind.RANDOM_WALK and spec.stationary:
        return 0.5 * spec.d * math.log(2.0 * math.pi * math.e * spec.sigma ** 2)
    return None


def monte_carlo_entropy(spec: DistributionSpec, n: int = 200_000, seed: int = 0) -> float:
    """Entropy estimate -E[log p(X)] from n samples (oracle for mixtures)."""
    X = sample(spec, n, seed)
    return float(-np.mean(log_pdf(spec, X)))


def reference_entropy(spec: DistributionSpec, n: int = 200_000, seed: int = 0) -> Optional[float]:
    """Closed form when available, Monte-Carlo otherwise, None for unbounded walks."""
    closed = true_entropy(spec)
    if closed is not None:
        return closed
    if spec.kind is DistributionKind.GAUSSIAN_MIXTURE:
        return monte_carlo_entropy(spec, n, seed)
    return None


def write_samples_csv(path: Path, X) -> Path:
    """One row per point, columns x0..x{d-1}."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow([f"x{j}" for j in range(X.shape[1])])
        writer.writerows([repr(float(v)) for v in row] for row in X)
    logger.info(f"💾 {X.shape[0]} samples written to {path}")
    return path
