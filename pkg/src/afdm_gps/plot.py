"""Minimal SVG line plots of CCDF and BER CSV files.

Written by hand rather than through a plotting library so that identical
CSV input always yields byte-identical SVG output.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

KINDS = {
    "ccdf": ("threshold_db", "ccdf", ("scheme", "V", "W", "pattern"), "PAPR threshold (dB)", "CCDF"),
    "ber": ("snr_db", "ber", ("scheme", "side_info_mode", "V", "W"), "SNR (dB)", "BER"),
}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 190, 20, 50


class PlotInputError(ValueError):
    pass


def read_series(csv_path, kind: str) -> dict[str, list[tuple[float, float]]]:
    if kind not in KINDS:
        raise PlotInputError(f"unknown plot kind {kind!r}")
    xcol, ycol, keys, _, _ = KINDS[kind]
    series: dict[str, list[tuple[float, float]]] = {}
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in (xcol, ycol) + keys if c not in (reader.fieldnames or [])]
        if missing:
            raise PlotInputError(f"line 1: missing columns {missing}")
        for row in reader:
            line = reader.line_num
            try:
                x, y = float(row[xcol]), float(row[ycol])
            except (TypeError, ValueError):
                raise PlotInputError(f"line {line}: non-numeric {xcol}/{ycol}") from None
            label = " ".join(f"{k}={row[k]}" for k in keys if row[k] not in ("", None))
            series.setdefault(label, []).append((x, y))
    if not series:
        raise PlotInputError("CSV has no data rows")
    return series


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    raw = (hi - lo) / max(count, 1)
    mag = 10 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def render_svg(series: dict[str, list[tuple[float, float]]], kind: str) -> str:
    _, _, _, xlabel, ylabel = KINDS[kind]
    pts = [(x, y) for s in series.values() for x, y in s if y > 0]
    if not pts:
        raise PlotInputError("no positive values to draw on a log axis")
    xmin = min(p[0] for p in pts)
    xmax = max(p[0] for p in pts)
    if xmax == xmin:
        xmax = xmin + 1.0
    dmin = math.floor(math.log10(min(p[1] for p in pts)))
    dmax = max(math.ceil(math.log10(max(p[1] for p in pts))), dmin + 1)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - xmin) / (xmax - xmin) * pw

    def sy(y):
        return TOP + (dmax - math.log10(y)) / (dmax - dmin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for d in range(dmin, dmax + 1):
        y = sy(10.0**d)
        out.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    for t in _ticks(xmin, xmax):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{TOP}" x2="{x:.2f}" y2="{TOP + ph}" stroke="#eee"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 16}" text-anchor="middle">{t:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{ylabel}</text>'
    )
    for i, (label, data) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in sorted(data) if y > 0)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = TOP + 14 + 16 * i
        out.append(f'<line x1="{WIDTH - RIGHT + 10}" y1="{ly - 4}" x2="{WIDTH - RIGHT + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 34}" y="{ly}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plot(csv_path, kind: str, out_path=None) -> Path:
    """Render ``csv_path`` to SVG next to it (or at ``out_path``)."""
    svg = render_svg(read_series(csv_path, kind), kind)
    out = Path(out_path) if out_path else Path(csv_path).with_suffix(".svg")
    out.write_text(svg)
    return out
