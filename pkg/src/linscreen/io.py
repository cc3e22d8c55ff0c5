"""File formats.

Matrices are header-free CSV, one row per line, written with ``repr`` so every
float round-trips exactly. Coefficient files carry an ``index,value`` header
and 1-based indices. JSON reports encode infinities as the strings ``"inf"``
and ``"-inf"``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import SparseCoefficients


def write_matrix(path, a) -> None:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    with open(path, "w", newline="") as fh:
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValidationError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError(f"{path}: ragged rows")
    return np.array(rows, dtype=np.float64)


def read_vector(path) -> np.ndarray:
    """Read a vector stored either as one column or as one row."""
    a = read_matrix(path)
    if a.shape[1] == 1 or a.shape[0] == 1:
        return a.ravel()
    raise ValidationError(f"{path}: expected a single row or column, got {a.shape}")


def write_coefficients(path, beta: SparseCoefficients) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("index,value\n")
        for i, v in zip(beta.support, beta.values):
            fh.write(f"{i + 1},{v!r}\n")


def read_coefficients(path, p: int) -> SparseCoefficients:
    support, values = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["index", "value"]:
            raise ValidationError(f"{path}: expected header 'index,value'")
        for row in reader:
            support.append(int(row["index"]) - 1)
            values.append(float(row["value"]))
    return SparseCoefficients(p, tuple(support), tuple(values))


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and infinities for ``json``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj, **kw) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False, **kw)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj, indent=2) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def parse_float(v) -> float:
    """Inverse of :func:`jsonable` for scalar floats (accepts ``"inf"``)."""
    return float(v)
