"""
Unit tests for the YAML suite loader.
"""
import os
import sys
import tempfile
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.core.errors import InvalidDistributionError
from modules.kme.synth.distributions import DistributionKind, reference_entropy
from modules.kme.synth.suite_loader import (
    default_sample_suite,
    load_sample_suite,
    load_walk_grid,
    select_distributions,
)

SUITE_ORDER = ['U2', '4N', '2N', 'N(0.02)', 'N(0.01)', 'N(0.005)']


class TestBundledSuite(TestCase):

    def test_repository_suite_matches_defaults(self):
        suite = load_sample_suite(REPO_ROOT / 'config' / 'suites.yaml', fallback_to_defaults=False)
        self.assertEqual([s.label for s in suite], SUITE_ORDER)
        for loaded, default in zip(suite, default_sample_suite()):
            self.assertEqual(loaded.to_dict(), default.to_dict())

    def test_reference_entropies_decrease_in_suite_order(self):
        entropies = [reference_entropy(spec, seed=0) for spec in default_sample_suite()]
        self.assertTrue(all(a > b for a, b in zip(entropies, entropies[1:])), entropies)

    def test_walk_grid(self):
        grid = load_walk_grid(REPO_ROOT / 'config' / 'suites.yaml')
        self.assertEqual(grid.dims, [2, 4, 64])
        self.assertEqual(grid.sigmas, [0.01, 0.1, 1.0])
        self.assertEqual(grid.steps, 100_000)
        specs = grid.specs()
        self.assertEqual(len(specs), 9)
        self.assertTrue(all(s.kind is DistributionKind.RANDOM_WALK for s in specs))


class TestCustomFiles(TestCase):

    def _write(self, text: str) -> Path:
        tmp = tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False)
        tmp.write(text)
        tmp.close()
        self.addCleanup(os.unlink, tmp.name)
        return Path(tmp.name)

    def test_env_override(self):
        path = self._write(
            "entropy_sample:\n"
            "  - {name: box, kind: uniform_box, lower: [0, 0], upper: [1, 1]}\n"
        )
        with patch.dict(os.environ, {'KME_SUITES_CONFIG': str(path)}):
            suite = load_sample_suite()
        self.assertEqual([s.label for s in suite], ['box'])

    def test_invalid_kind(self):
        path = self._write("entropy_sample:\n  - {name: x, kind: cauchy}\n")
        with self.assertRaises(InvalidDistributionError):
            load_sample_suite(path)

    def test_missing_field(self):
        path = self._write("entropy_sample:\n  - {name: g, kind: gaussian, mean: [0, 0]}\n")
        with self.assertRaises(InvalidDistributionError):
            load_sample_suite(path)

    def test_duplicate_names(self):
        path = self._write(
            "entropy_sample:\n"
            "  - {name: g, kind: gaussian, mean: [0], sigma2: 1.0}\n"
            "  - {name: g, kind: gaussian, mean: [0], sigma2: 2.0}\n"
        )
        with self.assertRaises(InvalidDistributionError):
            load_sample_suite(path)

    def test_missing_file(self):
        missing = Path(tempfile.gettempdir()) / 'kme_no_such_suites.yaml'
        self.assertEqual(len(load_sample_suite(missing)), 6)
        with self.assertRaises(FileNotFoundError):
            load_sample_suite(missing, fallback_to_defaults=False)
        self.assertEqual(load_walk_grid(missing).dims, [2, 4, 64])

    def test_select(self):
        suite = default_sample_suite()
        self.assertEqual([s.label for s in select_distributions(suite, ['N(0.01)', 'U2'])], ['U2', 'N(0.01)'])
        with self.assertRaises(InvalidDistributionError):
            select_distributions(suite, ['nope'])
