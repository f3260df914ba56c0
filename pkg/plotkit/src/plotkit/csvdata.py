"""Reader for the sweep CSV schema.

Column layout: omega_d_ghz,sample_id,solver,residual,fid_k*...,fid_gs,pop_manifold2.
Values arrive as decimal strings; they are parsed with float() and never
reformatted, so whatever the producer wrote survives a round trip exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

FIXED_LEAD = ("omega_d_ghz", "sample_id", "solver", "residual")
FIXED_TAIL = ("fid_gs", "pop_manifold2")


class DataError(ValueError):
    pass


@dataclass
class SweepTable:
    fid_columns: list[str]  # e.g. ["fid_k0", ..., "fid_k4"]
    omega: list[float]
    sample_id: list[int]
    solver: list[str]
    fids: dict[str, list[float]]

    @property
    def n_rows(self) -> int:
        return len(self.omega)


def read_sweep_csv(path) -> SweepTable:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {p}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DataError(f"{p} is empty")
    header = rows[0]
    if tuple(header[:4]) != FIXED_LEAD or tuple(header[-2:]) != FIXED_TAIL:
        raise DataError(f"{p} does not follow the sweep schema (header: {header[:6]}...)")
    fid_columns = header[4:-2]
    if not fid_columns or not all(c.startswith("fid_") for c in fid_columns):
        raise DataError(f"no fidelity columns in {p}")
    table = SweepTable(
        fid_columns=fid_columns,
        omega=[],
        sample_id=[],
        solver=[],
        fids={c: [] for c in fid_columns},
    )
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{p}:{lineno}: expected {len(header)} cells, got {len(row)}")
        table.omega.append(float(row[0]))
        table.sample_id.append(int(row[1]))
        table.solver.append(row[2])
        for c, cell in zip(fid_columns, row[4 : 4 + len(fid_columns)]):
            table.fids[c].append(float(cell))
    return table


def series_points(table: SweepTable, column: str, x_range=None):
    """(x, y) pairs for one fidelity column: clean sample only, failed rows
    and NaNs dropped, sorted by drive frequency."""
    if column not in table.fids:
        raise DataError(f"column {column!r} not present (have {table.fid_columns})")
    pts = [
        (x, y)
        for x, sid, solver, y in zip(table.omega, table.sample_id, table.solver, table.fids[column])
        if sid == 0 and solver != "failed" and not math.isnan(y)
    ]
    if x_range is not None:
        lo, hi = x_range
        pts = [(x, y) for x, y in pts if lo <= x <= hi]
    pts.sort(key=lambda xy: xy[0])
    return pts
