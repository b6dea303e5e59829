"""Deterministic CSV and JSON writers.

CSV: header row, floats with 17 significant digits (exact round trip),
``\\n`` line endings.  JSON: sorted keys, non-finite floats as the strings
``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["format_float", "export_csv", "export_json", "to_jsonable"]


def format_float(v):
    return format(float(v), ".17g")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def _write(path, text):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}", str(path)) from exc
    return path


def export_csv(rows, path, header):
    """Write ``rows`` under ``header`` to ``path``; returns the path."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([_cell(v) for v in row])
    return _write(path, buf.getvalue())


def to_jsonable(obj):
    """Convert numpy containers and non-finite floats to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def export_json(report, path):
    """Write ``report`` (a dict) as pretty JSON with sorted keys."""
    text = json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False)
    return _write(path, text + "\n")
