"""Minimal deterministic SVG line-chart writer.

No randomness, no timestamps, no system fonts queried: the same scene always
serializes to the same bytes.  The plotted series are also embedded verbatim
in a <metadata> JSON island so downstream tools can diff data instead of
pixels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

# fixed 8-color palette (Okabe-Ito, colorblind-safe)
PALETTE = ["#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#f0e442", "#000000"]

WIDTH, HEIGHT = 960.0, 600.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 74.0, 168.0, 36.0, 64.0
N_TICKS = 6


def _fmt(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]


def _ticks(lo: float, hi: float, n: int) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _tick_text(v: float) -> str:
    return f"{v:.6g}"


def render_chart(
    series: list[Series],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    x_label: str,
    y_label: str,
) -> str:
    x0, x1 = x_range
    y0, y1 = y_range
    if not (x1 > x0 and y1 > y0):
        raise ValueError("axis ranges must be increasing")
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(y: float) -> float:
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH:g} {HEIGHT:g}" '
        f'font-family="sans-serif" font-size="14">',
    ]
    payload = {
        "x_label": x_label,
        "y_label": y_label,
        "x_range": [x0, x1],
        "y_range": [y0, y1],
        "series": [{"label": s.label, "x": s.x, "y": s.y} for s in series],
    }
    # "]]>" cannot appear inside a CDATA section; JSON never produces it
    out.append("<metadata id=\"plot-data\"><![CDATA[" + json.dumps(payload, sort_keys=True) + "]]></metadata>")
    out.append(f'<rect x="0" y="0" width="{WIDTH:g}" height="{HEIGHT:g}" fill="#ffffff"/>')

    # gridlines + ticks
    for tx in _ticks(x0, x1, N_TICKS):
        px = _fmt(sx(tx))
        out.append(
            f'<line x1="{px}" y1="{_fmt(MARGIN_T)}" x2="{px}" y2="{_fmt(MARGIN_T + ph)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px}" y="{_fmt(MARGIN_T + ph + 22)}" text-anchor="middle">{_tick_text(tx)}</text>'
        )
    for ty in _ticks(y0, y1, N_TICKS):
        py = _fmt(sy(ty))
        out.append(
            f'<line x1="{_fmt(MARGIN_L)}" y1="{py}" x2="{_fmt(MARGIN_L + pw)}" y2="{py}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(MARGIN_L - 8)}" y="{py}" text-anchor="end" dominant-baseline="middle">'
            f"{_tick_text(ty)}</text>"
        )
    out.append(
        f'<rect x="{_fmt(MARGIN_L)}" y="{_fmt(MARGIN_T)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        f'fill="none" stroke="#333333" stroke-width="1.5"/>'
    )

    # data polylines, split at NaN gaps
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        segment: list[str] = []
        chunks: list[list[str]] = []
        for x, y in zip(s.x, s.y):
            if math.isnan(x) or math.isnan(y):
                if segment:
                    chunks.append(segment)
                    segment = []
                continue
            segment.append(f"{_fmt(sx(x))},{_fmt(sy(y))}")
        if segment:
            chunks.append(segment)
        for chunk in chunks:
            out.append(
                f'<polyline class="series" data-label="{s.label}" points="{" ".join(chunk)}" '
                f'fill="none" stroke="{color}" stroke-width="1.8"/>'
            )

    # legend
    lx = MARGIN_L + pw + 18
    for i, s in enumerate(series):
        ly = MARGIN_T + 12 + 24 * i
        color = PALETTE[i % len(PALETTE)]
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly)}" x2="{_fmt(lx + 26)}" y2="{_fmt(ly)}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        out.append(f'<text x="{_fmt(lx + 32)}" y="{_fmt(ly + 5)}">{s.label}</text>')

    # axis labels
    out.append(
        f'<text x="{_fmt(MARGIN_L + pw / 2)}" y="{_fmt(HEIGHT - 14)}" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="20" y="{_fmt(MARGIN_T + ph / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_fmt(MARGIN_T + ph / 2)})">{y_label}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
