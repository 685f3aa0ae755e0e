"""Report assembly and serialisation.

Reports are JSON objects with sorted keys, two-space indentation and a
trailing newline. Floats use Python's shortest round-trip repr, so a
value read back is bit-identical to the one written; non-finite values
become null. Tables go to CSV with 17 significant digits.
"""
import json
import math

import click
import numpy as np
import pandas as pd

from seedtarget import __version__
from seedtarget.models import SeedPair

SCHEMA_VERSION = 1
CSV_FLOAT_FORMAT = '%.17g'


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_plain(v) for v in items]
    if isinstance(value, SeedPair):
        return [value.first, value.second]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def build_report(command, run_config, payload):
    report = {
        'tool': 'seedtarget',
        'version': __version__,
        'schema_version': SCHEMA_VERSION,
        'command': command,
        'config': run_config.as_dict() if hasattr(run_config, 'as_dict') else dict(run_config or {}),
    }
    report.update(payload)
    return _plain(report)


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def write_json(report, path):
    """Write a report to ``path``; ``-`` means stdout."""
    text = dumps(report)
    if path in (None, '-'):
        click.echo(text, nl=False)
        return
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text)


def write_csv(rows, path, columns=None):
    frame = pd.DataFrame([_plain(row) for row in rows], columns=columns)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return frame
