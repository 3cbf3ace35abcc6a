"""Serialisation with 17 significant digits for every float."""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["format_float", "dumps_json", "write_json", "write_csv", "grid_to_csv", "read_json"]


def format_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj):
    """JSON text; non-finite floats use the Infinity/NaN literals that ``json.loads`` accepts."""
    return _encode(obj)


def write_json(obj, path=None):
    text = dumps_json(obj) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def read_json(path):
    return json.loads(Path(path).read_text())


def write_csv(header, rows, path=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def grid_to_csv(field, path=None):
    """Long-format (t, x, y) dump with a one-line grid header."""
    grid = field.grid
    tt, xx = np.meshgrid(grid.t, grid.x, indexing="ij")
    header_line = f"# varwave grid n_t={grid.n_t} n_x={grid.n_x} T={format_float(grid.T)}\n"
    rows = zip(tt.ravel().tolist(), xx.ravel().tolist(), field.values.ravel().tolist())
    text = header_line + write_csv(["t", "x", "y"], rows)
    if path is not None:
        Path(path).write_text(text)
    return text
