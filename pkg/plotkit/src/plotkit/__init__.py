"""Deterministic SVG charts from sweep CSV output."""

from .csvdata import DataError, SweepTable, read_sweep_csv, series_points
from .render import PlotSpec, extract_data_series, render_fidelity_plot
from .svg import Series, render_chart

__all__ = [
    "DataError",
    "PlotSpec",
    "Series",
    "SweepTable",
    "extract_data_series",
    "read_sweep_csv",
    "render_chart",
    "render_fidelity_plot",
    "series_points",
]

__version__ = "0.1.0"
