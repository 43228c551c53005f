"""
Unit tests for csv/json report output.
"""
import json
import sys
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO_ROOT))

from modules.kme.scripts.report_writer import ReportWriter, read_csv_report

COLUMNS = ['seed', 'step', 'bound']
ROWS = [
    {'seed': 0, 'step': 100, 'bound': np.float64(-1.25)},
    {'seed': 0, 'step': 200, 'bound': float('nan')},
]


class TestCsvReport(TestCase):

    def test_config_line_header_and_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'nested' / 'run.csv'
            paths = ReportWriter(out, 'csv', {'k': 10, 'seed': np.int64(3)}).write(
                COLUMNS, ROWS, {'ok': True, 'gap': float('inf')}
            )
            lines = out.read_text().splitlines()
            parsed = read_csv_report(out)
            sidecar = json.loads((Path(tmp) / 'nested' / 'run_summary.json').read_text())

        self.assertEqual(len(paths), 2)
        self.assertEqual(lines[0], '# config: {"k": 10, "seed": 3}')
        self.assertEqual(lines[1], 'seed,step,bound')
        self.assertEqual(lines[2], '0,100,-1.25')
        self.assertEqual(lines[3], '0,200,')
        self.assertEqual(parsed['config'], {'k': 10, 'seed': 3})
        self.assertEqual(parsed['rows'][0]['bound'], '-1.25')
        self.assertEqual(sidecar, {'config': {'k': 10, 'seed': 3}, 'summary': {'ok': True, 'gap': None}})

    def test_header_only_when_no_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'empty.csv'
            ReportWriter(out, 'csv', {}).write(COLUMNS, [])
            parsed = read_csv_report(out)
        self.assertEqual(parsed['columns'], COLUMNS)
        self.assertEqual(parsed['rows'], [])

    def test_floats_round_trip_exactly(self):
        value = 0.1 + 0.2
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'x.csv'
            ReportWriter(out, 'csv').write(['v'], [{'v': value}])
            self.assertEqual(float(read_csv_report(out)['rows'][0]['v']), value)


class TestJsonReport(TestCase):

    def test_single_document(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'run.json'
            writer = ReportWriter(out, 'json', {'k': 10})
            paths = writer.write(COLUMNS, ROWS, {'seeds': 1})
            document = json.loads(out.read_text())
        self.assertEqual(paths, [out])
        self.assertEqual(writer.summary_path, out)
        self.assertEqual(document['config'], {'k': 10})
        self.assertEqual(document['columns'], COLUMNS)
        self.assertEqual(document['rows'][1], {'seed': 0, 'step': 200, 'bound': None})
        self.assertEqual(document['summary'], {'seeds': 1})

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            ReportWriter(Path('out.parquet'), 'parquet')
