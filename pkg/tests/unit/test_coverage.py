"""
Unit tests for grid coverage.
"""
import sys
from pathlib import Path
from unittest import TestCase

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.density import SupportBox
from modules.kme.core.errors import InvalidHyperparameterError, UnsupportedDimensionError
from modules.kme.explore.coverage import (
    CoverageGrid,
    cell_indices,
    coverage_metric,
    try_coverage_grid,
)


def cube(d: int) -> SupportBox:
    return SupportBox(np.full(d, -1.0), np.full(d, 1.0))


class TestCoverageMetric(TestCase):

    def test_single_repeated_state(self):
        states = np.tile([0.3, -0.2], (100, 1))
        self.assertEqual(coverage_metric(states, cube(2), 10), 1 / 100)

    def test_every_cell_visited(self):
        centers = (np.arange(4) + 0.5) / 4 * 2.0 - 1.0
        states = np.array([[x, y] for x in centers for y in centers])
        self.assertEqual(coverage_metric(states, cube(2), 4), 1.0)

    def test_uniform_samples_cover_grid(self):
        states = np.random.default_rng(0).uniform(-1.0, 1.0, size=(10_000, 2))
        self.assertGreater(coverage_metric(states, cube(2), 10), 0.99)

    def test_empty_states(self):
        self.assertEqual(coverage_metric(np.empty((0, 2)), cube(2), 10), 0.0)

    def test_boundary_points_clip_to_edge_cells(self):
        cells = cell_indices([[1.0, 1.0], [5.0, -5.0]], cube(2), 10)
        self.assertEqual(cells.tolist(), [99, 90])

    def test_limits(self):
        with self.assertRaises(UnsupportedDimensionError):
            coverage_metric(np.zeros((1, 5)), cube(5), 2)
        with self.assertRaises(InvalidHyperparameterError):
            coverage_metric(np.zeros((1, 2)), cube(2), 0)


class TestCoverageGrid(TestCase):

    def test_incremental(self):
        grid = CoverageGrid(cube(1), 4)
        self.assertEqual(grid.add([[-0.9]]), 0.25)
        self.assertEqual(grid.add([[-0.8], [0.9]]), 0.5)
        self.assertEqual(grid.add(np.empty((0, 1))), 0.5)
        self.assertEqual(grid.visited_cells, 2)

    def test_try_grid(self):
        self.assertIsNone(try_coverage_grid(cube(5), 10))
        self.assertIsInstance(try_coverage_grid(cube(4), 3), CoverageGrid)
