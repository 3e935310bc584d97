"""Reading simulator CSV output.

The simulator's column contract is fixed: any deviation from the exact
header below is rejected rather than reinterpreted.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MissingFile, SchemaError

CSV_HEADER = ("t,x1,x2,x3,x4,x5,u1,u2,x3ref,x1ref,kappa5,il,"
              "x2star,x4star,sat1,sat2")
COLUMNS = CSV_HEADER.split(",")


def load_csv(path: Path) -> dict[str, np.ndarray]:
    """Column name -> array; zero-length arrays for a header-only file."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"no such CSV: {path}")
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise SchemaError(f"{path.name}: unexpected header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = np.empty((0, len(COLUMNS)))
    if data.shape[1] != len(COLUMNS):
        raise SchemaError(f"{path.name}: expected {len(COLUMNS)} columns, "
                          f"got {data.shape[1]}")
    return {name: data[:, i] for i, name in enumerate(COLUMNS)}
