"""
State-Space Coverage

Fraction of the cells of a regular grid over a SupportBox that contain at
least one visited state. Points outside the box count toward the nearest
boundary cell.
"""

from typing import Optional

import numpy as np

from ..core.density import SupportBox
from ..core.errors import (
    DimensionMismatchError,
    InvalidHyperparameterError,
    UnsupportedDimensionError,
)

MAX_COVERAGE_DIM = 4


def _check_grid(box: SupportBox, cells_per_axis: int) -> None:
    if cells_per_axis < 1:
        raise InvalidHyperparameterError(f"cells_per_axis must be >= 1 (got {cells_per_axis})")
    if box.d > MAX_COVERAGE_DIM:
        raise UnsupportedDimensionError(
            f"Coverage grid supports d <= {MAX_COVERAGE_DIM} (got d={box.d})"
        )


def cell_indices(states, box: SupportBox, cells_per_axis: int) -> np.ndarray:
    """Flat (row-major) grid cell index of every state."""
    X = np.asarray(states, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, box.d)
    if X.shape[1] != box.d:
        raise DimensionMismatchError(f"States have dimension {X.shape[1]}, box has d={box.d}")
    scaled = (X - box.lower) / (box.upper - box.lower) * cells_per_axis
    cells = np.clip(np.floor(scaled).astype(np.int64), 0, cells_per_axis - 1)
    return np.ravel_multi_index(tuple(cells.T), (cells_per_axis,) * box.d)


def coverage_metric(states, box: SupportBox, cells_per_axis: int) -> float:
    """
    Raises:
        UnsupportedDimensionError: If d > 4
    """
    _check_grid(box, cells_per_axis)
    X = np.asarray(states, dtype=np.float64)
    if X.size == 0:
        return 0.0
    visited = np.unique(cell_indices(X, box, cells_per_axis))
    return visited.shape[0] / cells_per_axis ** box.d


class CoverageGrid:
    """Cumulative coverage over successive batches of states."""

    def __init__(self, box: SupportBox, cells_per_axis: int):
        _check_grid(box, cells_per_axis)
        self.box = box
        self.cells_per_axis = cells_per_axis
        self.total_cells = cells_per_axis ** box.d
        self._visited = np.zeros(self.total_cells, dtype=bool)

    def add(self, states) -> float:
        X = np.asarray(states, dtype=np.float64)
        if X.size:
            self._visited[cell_indices(X, self.box, self.cells_per_axis)] = True
        return self.coverage()

    @property
    def visited_cells(self) -> int:
        return int(self._visited.sum())

    def coverage(self) -> float:
        return self.visited_cells / self.total_cells


def try_coverage_grid(box: SupportBox, cells_per_axis: int) -> Optional[CoverageGrid]:
    """CoverageGrid, or None when the dimension is too large for a grid."""
    if box.d > MAX_COVERAGE_DIM:
        return None
    return CoverageGrid(box, cells_per_axis)
