"""Column-oriented CSV export/import for traces and channels."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import InvalidSample


def write_columns(path: str | Path, columns: dict[str, np.ndarray]):
    """Write named equal-length columns: one header row, one row per frame.

    Values are rendered with shortest round-trip precision, so re-importing
    reproduces them exactly.
    """
    lengths = {name: len(np.atleast_1d(vals)) for name, vals in columns.items()}
    if len(set(lengths.values())) > 1:
        raise InvalidSample(f"column lengths differ: {lengths}")
    names = list(columns.keys())
    arrays = [np.atleast_1d(columns[n]) for n in names]
    n_rows = len(arrays[0]) if arrays else 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(n_rows):
            writer.writerow([repr(float(col[i])) for col in arrays])


def read_columns(path: str | Path) -> dict[str, np.ndarray]:
    """Read a CSV written by write_columns back into named float arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidSample(f"{path}: empty file, expected a header row") from None
        rows = [row for row in reader if row]
    data = {name: np.empty(len(rows)) for name in header}
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise InvalidSample(f"{path}: row {i + 2} has {len(row)} fields, expected {len(header)}")
        for name, cell in zip(header, row):
            data[name][i] = float(cell)
    return data
