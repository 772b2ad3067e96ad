"""Delimited and JSON output with atomic writes and round-trip-exact floats.

Real numbers are serialized with 17 significant digits, enough to round-trip
64-bit floats exactly. Every file is written to a temporary sibling and
renamed into place so a crash never leaves a partial artifact.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = [
    "fmt_float",
    "atomic_write_text",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_trace_csv",
    "write_json",
]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path: "str | Path", text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        umask = os.umask(0)
        os.umask(umask)
        os.fchmod(fd, 0o666 & ~umask)
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_csv(path, matrix: np.ndarray, header: "list[str] | None" = None) -> None:
    """Write a 2-D array as CSV, 17 significant digits per entry."""
    matrix = np.asarray(matrix, dtype=float)
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for row in matrix:
        lines.append(",".join(fmt_float(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    from .datasets import _read_numeric_csv

    return _read_numeric_csv(path)


def write_trace_csv(path, trace) -> None:
    """Loss history as CSV: one row per descent step."""
    degrees = max((len(t.per_degree) for t in trace), default=1)
    header = ["step", "total", "topological", "metric"] + [
        f"degree{q}" for q in range(degrees)
    ]
    lines = [",".join(header)]
    for step, entry in enumerate(trace):
        cells = [str(step)] + [
            fmt_float(v) for v in (entry.total, entry.topological, entry.metric)
        ]
        cells += [fmt_float(v) for v in entry.per_degree]
        cells += ["0"] * (degrees - len(entry.per_degree))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    """JSON with sorted keys, so identical content gives identical bytes."""
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")
