"""
Voronoi Density Estimation

Density estimate p(x) ~ 1 / (k * m(c_i)) where c_i is the weighted Voronoi
cell containing x and m its Lebesgue measure. Cell measures are estimated by
uniform Monte-Carlo sampling of a bounding box (grid quadrature for d <= 2 as
an oracle).
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .clustering import ClusterModel, assign, assign_many
from .errors import (
    InvalidHyperparameterError,
    UnsupportedDimensionError,
    ZeroMeasureCellError,
)

logger = logging.getLogger(__name__)

DEFAULT_MC_SAMPLES = 1_000_000
MC_CHUNK_SIZE = 100_000
MAX_GRID_DIM = 2


@dataclass
class SupportBox:
    """Axis-aligned bounding box of the support."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise InvalidHyperparameterError(
                f"Box bounds must be vectors of equal length (got {self.lower.shape}, {self.upper.shape})"
            )
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise InvalidHyperparameterError("Box bounds must be finite")
        if not np.all(self.lower < self.upper):
            raise InvalidHyperparameterError("Box lower bound must be < upper bound on every axis")

    @property
    def d(self) -> int:
        return self.lower.shape[0]

    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def interior_grid(self, points_per_axis: int = 5, inset: float = 0.1) -> np.ndarray:
        """
        Evenly spaced evaluation points at least `inset` box widths from every face.

        Returns:
            (points_per_axis^d, d) array
        """
        width = self.upper - self.lower
        axes = [
            np.linspace(lo + inset * w, lo + (1.0 - inset) * w, points_per_axis)
            for lo, w in zip(self.lower, width)
        ]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=1)

    def to_dict(self):
        return {'lower': self.lower.tolist(), 'upper': self.upper.tolist()}


@dataclass
class MeasureEstimate:
    """Estimated Lebesgue measure of every cluster cell inside a box."""

    measures: np.ndarray
    cell_counts: np.ndarray
    mc_samples: int
    seed: Optional[int]
    box_volume: float


def empirical_support_box(samples, margin: float = 0.01) -> SupportBox:
    """Bounding box of the samples, expanded by `margin` of the width per side."""
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    lower = X.min(axis=0)
    upper = X.max(axis=0)
    width = np.where(upper > lower, upper - lower, 1.0)
    return SupportBox(lower - margin * width, upper + margin * width)


def _partition_volume(volume: float, cell_counts: np.ndarray, total: int) -> np.ndarray:
    """
    Scale cell counts to measures whose fsum is the box volume.

    The rounding remainder goes to the last nonzero cell.
    """
    measures = volume * cell_counts / total
    nonzero = np.flatnonzero(cell_counts)
    if nonzero.size:
        last = nonzero[-1]
        measures[last] = 0.0
        measures[last] = volume - math.fsum(measures)
    return measures


def _count_chunk(model: ClusterModel, box: SupportBox, n: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    X = box.lower + (box.upper - box.lower) * rng.random((n, box.d))
    return np.bincount(assign_many(model, X), minlength=model.k)


def cluster_measures_mc(
    model: ClusterModel,
    box: SupportBox,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
    max_workers: int = 1
) -> MeasureEstimate:
    """
    Monte-Carlo estimate of every cell measure.

    Samples are drawn in fixed-size chunks with per-chunk child seeds, so the
    result is deterministic given seed and independent of max_workers.

    Raises:
        InvalidHyperparameterError: If mc_samples < 1 or the box dimension differs from d
    """
    if mc_samples < 1:
        raise InvalidHyperparameterError(f"mc_samples must be >= 1 (got {mc_samples})")
    if box.d != model.d:
        raise InvalidHyperparameterError(f"Box has dimension {box.d}, model has d={model.d}")

    sizes = [MC_CHUNK_SIZE] * (mc_samples // MC_CHUNK_SIZE)
    if mc_samples % MC_CHUNK_SIZE:
        sizes.append(mc_samples % MC_CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    if max_workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            partials = list(executor.map(lambda args: _count_chunk(model, box, *args), zip(sizes, children)))
    else:
        partials = [_count_chunk(model, box, n, child) for n, child in zip(sizes, children)]

    cell_counts = np.sum(partials, axis=0).astype(np.int64)
    volume = box.volume()
    logger.debug(
        f"MC measures: {mc_samples} samples in {len(sizes)} chunk(s), "
        f"{int(np.sum(cell_counts == 0))} empty cell(s)"
    )
    return MeasureEstimate(
        measures=_partition_volume(volume, cell_counts, mc_samples),
        cell_counts=cell_counts,
        mc_samples=int(mc_samples),
        seed=seed,
        box_volume=volume,
    )


def cluster_measures_grid(model: ClusterModel, box: SupportBox, cells_per_axis: int = 512) -> MeasureEstimate:
    """
    Midpoint-rule quadrature of every cell measure (d <= 2 only).

    Raises:
        UnsupportedDimensionError: If d > 2
    """
    if model.d > MAX_GRID_DIM:
        raise UnsupportedDimensionError(
            f"Grid quadrature supports d <= {MAX_GRID_DIM} (got d={model.d})"
        )
    width = (box.upper - box.lower) / cells_per_axis
    axes = [lo + (np.arange(cells_per_axis) + 0.5) * w for lo, w in zip(box.lower, width)]
    mesh = np.meshgrid(*axes, indexing='ij')
    midpoints = np.stack([m.ravel() for m in mesh], axis=1)

    cell_counts = np.bincount(assign_many(model, midpoints), minlength=model.k).astype(np.int64)
    volume = box.volume()
    return MeasureEstimate(
        measures=_partition_volume(volume, cell_counts, midpoints.shape[0]),
        cell_counts=cell_counts,
        mc_samples=int(midpoints.shape[0]),
        seed=None,
        box_volume=volume,
    )


def density_estimate(model: ClusterModel, measures: MeasureEstimate, x) -> float:
    """
    1 / (k * m(c_i)) for the cell containing x.

    Raises:
        ZeroMeasureCellError: If the cell got no samples (mc_samples too small)
    """
    i = assign(model, x)
    measure = measures.measures[i]
    if measure <= 0:
        raise ZeroMeasureCellError(
            f"Cell {i} has zero estimated measure after {measures.mc_samples} samples; "
            f"increase mc_samples"
        )
    return float(1.0 / (model.k * measure))


def density_estimate_many(model: ClusterModel, measures: MeasureEstimate, X) -> np.ndarray:
    """
    Vectorised density_estimate over the rows of X.

    Raises:
        ZeroMeasureCellError: If any point falls in a zero-measure cell
    """
    labels = assign_many(model, X)
    cell_measures = measures.measures[labels]
    if np.any(cell_measures <= 0):
        empty = sorted(set(int(i) for i in labels[cell_measures <= 0]))
        raise ZeroMeasureCellError(
            f"Cells {empty[:10]} have zero estimated measure after {measures.mc_samples} samples; "
            f"increase mc_samples"
        )
    return 1.0 / (model.k * cell_measures)


def write_cluster_table(path: Path, model: ClusterModel, measures: MeasureEstimate) -> Path:
    """
    Write per-cluster rows (index, count, measure, density_at_center) as CSV.

    density_at_center is left blank when the center's cell has zero measure.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['index', 'count', 'measure', 'density_at_center'])
        for i in range(model.k):
            try:
                density = repr(float(density_estimate(model, measures, model.centers[i])))
            except ZeroMeasureCellError:
                density = ''
            writer.writerow([i, int(model.counts[i]), repr(float(measures.measures[i])), density])
    logger.info(f"💾 Cluster table written to {path}")
    return path
