"""Deterministic CSV output: 15 significant digits, '#' comments, no locale."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_value(x: float) -> str:
    return f"{x:.15g}"


def write_csv(
    path: str | Path,
    columns: Sequence[str],
    arrays: Sequence[np.ndarray],
    config_hash: str,
    comments: Iterable[str] = (),
) -> Path:
    """Write column arrays as CSV with a config-hash comment line.

    All columns must have equal length.  Output is byte-reproducible for
    identical inputs.
    """
    if len(columns) != len(arrays):
        raise ValueError("column names and arrays differ in count")
    arrays = [np.asarray(a) for a in arrays]
    n = len(arrays[0])
    for name, a in zip(columns, arrays):
        if len(a) != n:
            raise ValueError(f"column {name!r} has length {len(a)}, expected {n}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# config_hash: {config_hash}"]
    lines.extend(f"# {c}" for c in comments)
    lines.append(",".join(columns))
    for i in range(n):
        lines.append(",".join(format_value(float(a[i])) for a in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
