"""
Report Writer

Writes experiment output files. Every file embeds the effective run config:
- csv: a '# config: {...}' comment line, the header row, then one row per
  record; the summary goes to a sibling '<stem>_summary.json'
- json: one document {config, rows, summary}
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('csv', 'json')


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def _csv_cell(value: Any) -> str:
    value = _clean(value)
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


class ReportWriter:
    """
    Writes rows + summary for one command run.

    Args:
        output_path: Target file (parents are created)
        fmt: 'csv' or 'json'
        config: Effective run configuration, echoed into the file
    """

    def __init__(self, output_path: Path, fmt: str = 'csv', config: Optional[Dict[str, Any]] = None):
        if fmt not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format '{fmt}'. Valid values: {', '.join(OUTPUT_FORMATS)}")
        self.output_path = Path(output_path)
        self.fmt = fmt
        self.config = _clean(config or {})

    @property
    def summary_path(self) -> Path:
        if self.fmt == 'json':
            return self.output_path
        return self.output_path.with_name(f"{self.output_path.stem}_summary.json")

    def config_line(self) -> str:
        return f"# config: {json.dumps(self.config, sort_keys=True)}"

    def write(
        self,
        columns: Sequence[str],
        rows: List[Dict[str, Any]],
        summary: Optional[Dict[str, Any]] = None
    ) -> List[Path]:
        """
        Write the report.

        Returns:
            Paths written
        """
        self.output_path.parent.mkdir(parents=True, exist_ok=True)
        summary = _clean(summary or {})

        if self.fmt == 'json':
            document = {
                'config': self.config,
                'columns': list(columns),
                'rows': [_clean({c: row.get(c) for c in columns}) for row in rows],
                'summary': summary,
            }
            with open(self.output_path, 'w') as f:
                json.dump(document, f, indent=2, sort_keys=True)
            logger.info(f"💾 Report written to {self.output_path} ({len(rows)} rows)")
            return [self.output_path]

        with open(self.output_path, 'w', newline='') as f:
            f.write(self.config_line() + '\n')
            writer = csv.writer(f)
            writer.writerow(list(columns))
            for row in rows:
                writer.writerow([_csv_cell(row.get(c)) for c in columns])

        with open(self.summary_path, 'w') as f:
            json.dump({'config': self.config, 'summary': summary}, f, indent=2, sort_keys=True)

        logger.info(f"💾 Report written to {self.output_path} ({len(rows)} rows), summary {self.summary_path}")
        return [self.output_path, self.summary_path]


def read_csv_report(path: Path) -> Dict[str, Any]:
    """
    Parse a csv report back into {config, columns, rows} (rows as strings).
    """
    with open(path, 'r', newline='') as f:
        first = f.readline().rstrip('\n')
        config = json.loads(first[len('# config: '):]) if first.startswith('# config: ') else {}
        reader = csv.reader(f)
        columns = next(reader, [])
        rows = [dict(zip(columns, values)) for values in reader]
    return {'config': config, 'columns': columns, 'rows': rows}
