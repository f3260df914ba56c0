"""Fidelity-vs-drive-frequency plots from sweep CSV files."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .csvdata import DataError, read_sweep_csv, series_points
from .svg import Series, render_chart

_CDATA = re.compile(r'<metadata id="plot-data"><!\[CDATA\[(.*?)\]\]></metadata>', re.S)


@dataclass
class PlotSpec:
    input_csv: Path
    output: Path
    targets: list[str] | None = None  # k-labels like ["k0", "k2"]; None = all
    x_range: tuple[float, float] | None = None  # GHz
    y_label: str = "steady-state fidelity"
    x_label: str = "drive frequency (GHz)"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.input_csv = Path(self.input_csv)
        self.output = Path(self.output)
        if self.x_range is not None:
            lo, hi = self.x_range
            if not hi > lo:
                raise DataError(f"x-range must be increasing, got {self.x_range}")


def _wanted_columns(spec: PlotSpec, available: list[str]) -> list[str]:
    if spec.targets is None:
        return list(available)
    columns = []
    for label in spec.targets:
        col = label if label.startswith("fid_") else f"fid_{label}"
        if col not in available:
            raise DataError(f"column {col!r} not present (have {available})")
        columns.append(col)
    return columns


def render_fidelity_plot(spec: PlotSpec) -> Path:
    """One curve per target fidelity column, clean sample only.

    Nothing is written unless every requested column exists and carries at
    least one plottable row, so a failed render leaves no file behind.
    """
    table = read_sweep_csv(spec.input_csv)
    columns = _wanted_columns(spec, table.fid_columns)

    series = []
    for col in columns:
        pts = series_points(table, col, spec.x_range)
        label = col[len("fid_"):]
        series.append(Series(label=label, x=[p[0] for p in pts], y=[p[1] for p in pts]))
    if all(not s.x for s in series):
        raise DataError(f"no plottable rows in {spec.input_csv}")

    if spec.x_range is not None:
        x_range = spec.x_range
    else:
        xs = [x for s in series for x in s.x]
        x_range = (min(xs), max(xs))
    text = render_chart(series, x_range, (0.0, 1.0), spec.x_label, spec.y_label)
    spec.output.write_text(text)
    return spec.output


def extract_data_series(svg_path) -> dict:
    """Pull the embedded data island back out of a rendered chart.

    Round-trips exactly: the JSON was produced from the floats that were
    plotted, so comparing two extractions compares the plotted data.
    """
    text = Path(svg_path).read_text()
    m = _CDATA.search(text)
    if m is None:
        raise DataError(f"{svg_path} carries no plot-data metadata")
    return json.loads(m.group(1))
