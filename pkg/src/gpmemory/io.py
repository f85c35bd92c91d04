"""CSV/JSON serialisation of fields and reports.

Fields are written in long format ``x,t,theta`` with a header row, ``.``
decimal separator and LF line endings; floats use ``%.17g`` so a round trip
is exact.  Grid and boundary metadata go to a JSON sidecar next to the CSV.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .timedomain import Field, Grid

__all__ = [
    "sidecar_path",
    "write_long_csv",
    "read_long_csv",
    "write_field",
    "read_field",
    "write_json",
]

HEADER = "x,t,theta"
FLOAT_FMT = "%.17g"


def sidecar_path(csv_path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".meta.json")


def _clean(obj):
    # JSON has no NaN/inf; map them to null
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def write_json(path, data: dict) -> None:
    text = json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", newline="\n")


def write_long_csv(path, xs, ts, values) -> None:
    """Write ``values[n, i] = theta(xs[i], ts[n])`` as rows sorted by x, then t."""
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (ts.size, xs.size):
        raise ValidationError(f"values shape {values.shape} does not match ({ts.size}, {xs.size})")
    X, T = np.meshgrid(xs, ts, indexing="ij")
    rows = np.column_stack([X.ravel(), T.ravel(), values.T.ravel()])
    with open(path, "w", newline="\n") as fh:
        np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",", header=HEADER, comments="")


def read_long_csv(path):
    """Inverse of :func:`write_long_csv`; returns ``(xs, ts, values)``."""
    with open(path) as fh:
        header = fh.readline().strip()
    if header != HEADER:
        raise ValidationError(f"{path}: expected header {HEADER!r}, got {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    ts = np.unique(data[:, 1])
    if data.shape[0] != xs.size * ts.size:
        raise ValidationError(f"{path}: rows do not form a full x-t grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(xs.size, ts.size).T
    return xs, ts, values


def write_field(field: Field, path, x_stride: int = 1, t_stride: int = 1) -> Path:
    """Write a field (optionally subsampled) and its JSON sidecar; returns the sidecar path."""
    xi = np.arange(0, field.grid.nx + 1, x_stride)
    ti = np.arange(0, field.grid.nt + 1, t_stride)
    write_long_csv(path, field.x[xi], field.t[ti], field.values[np.ix_(ti, xi)])
    meta = {
        "grid": field.grid.as_dict(),
        "stride": {"x": int(x_stride), "t": int(t_stride)},
        "boundary": field.boundary_meta,
        "solver": field.meta,
        "warnings": list(field.warnings),
    }
    side = sidecar_path(path)
    write_json(side, meta)
    return side


def read_field(path) -> Field:
    """Rebuild a :class:`Field` from a CSV written by :func:`write_field`.

    A subsampled file yields a field on the coarser grid it actually holds.
    """
    xs, ts, values = read_long_csv(path)
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {}
    grid = Grid(float(xs[-1]), xs.size - 1, float(ts[-1]), ts.size - 1)
    return Field(
        grid=grid,
        values=values,
        boundary_meta=meta.get("boundary", {}),
        meta=meta.get("solver", {}),
        warnings=meta.get("warnings", []),
    )
