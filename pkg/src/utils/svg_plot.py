# src/utils/svg_plot.py
"""Plot garis SVG minimal dari CSV hasil eksperimen, byte-deterministik"""
import os
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.errors import InvalidArgumentError

PLOT_KINDS = ("line_log_y", "line")

# header CSV -> (judul, kolom x, kolom y, label x, label y)
SCHEMAS = {
    ("layer", "variance", "n"): ("Variance per layer", "layer", "variance", "layer", "variance"),
    ("layer", "bin_lo", "bin_hi", "pairs", "r"): ("Correlogram", "bin_mid", "r", "distance", "pearson r"),
}

WIDTH, HEIGHT = 640, 400
MARGIN_TOP, MARGIN_RIGHT, MARGIN_BOTTOM, MARGIN_LEFT = 48, 24, 48, 72
TICKS = 5


def _read_series(csv_path: str) -> Tuple[Tuple[str, ...], np.ndarray, np.ndarray]:
    try:
        frame = pd.read_csv(csv_path, na_values=["null"], keep_default_na=False)
    except (OSError, ValueError) as e:
        raise InvalidArgumentError(f"gagal membaca CSV {csv_path}: {str(e)}")
    header = tuple(frame.columns)
    if header not in SCHEMAS:
        raise InvalidArgumentError(f"skema CSV tidak dikenal: {list(header)}")
    _, x_column, y_column, _, _ = SCHEMAS[header]
    if x_column == "bin_mid":
        xs = (frame["bin_lo"].to_numpy(dtype=np.float64) + frame["bin_hi"].to_numpy(dtype=np.float64)) / 2.0
    else:
        xs = frame[x_column].to_numpy(dtype=np.float64)
    ys = frame[y_column].to_numpy(dtype=np.float64)
    return header, xs, ys


def _range(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return 0.0, 1.0
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return lo - 0.5, hi + 0.5
    return lo, hi


def render_line_svg(
    title: str,
    xs: Sequence[float],
    ys: Sequence[float],
    log_y: bool = False,
    x_label: str = "",
    y_label: str = "",
) -> str:
    """
    Render satu seri sebagai path SVG.

    Titik dengan y tidak finite (atau <= 0 pada skala log) dilewati.
    Tanpa titik valid, hanya sumbu yang digambar.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    keep = np.isfinite(xs) & np.isfinite(ys)
    if log_y:
        keep &= ys > 0
    xs, ys = xs[keep], ys[keep]
    plotted = np.log10(ys) if log_y else ys

    x_lo, x_hi = _range(xs)
    y_lo, y_hi = _range(plotted)
    if log_y:
        y_lo, y_hi = np.floor(y_lo), np.ceil(y_hi)
        if y_lo == y_hi:
            y_hi = y_lo + 1.0

    cw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ch = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + ch

    def sx(value: float) -> float:
        return x0 + cw * (value - x_lo) / (x_hi - x_lo)

    def sy(value: float) -> float:
        return y0 - ch * (value - y_lo) / (y_hi - y_lo)

    out: List[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" role="img" aria-label="{title}">'
    )
    out.append('  <style>')
    out.append('    .t { fill: #24292f; font-family: monospace; font-size: 12px; }')
    out.append('    .title { font-size: 16px; font-weight: 600; }')
    out.append('    .axis { stroke: #24292f; stroke-width: 1; }')
    out.append('    .grid { stroke: #24292f; stroke-width: 1; opacity: .15; }')
    out.append('    .line { fill: none; stroke: #0969da; stroke-width: 2; }')
    out.append('  </style>')
    out.append(f'  <text x="{x0}" y="{MARGIN_TOP - 20}" class="t title">{title}</text>')
    out.append(f'  <line x1="{x0}" y1="{y0}" x2="{x0 + cw}" y2="{y0}" class="axis"/>')
    out.append(f'  <line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" class="axis"/>')

    for i in range(TICKS + 1):
        fraction = i / TICKS
        gx = x0 + cw * fraction
        gy = y0 - ch * fraction
        x_value = x_lo + (x_hi - x_lo) * fraction
        y_value = y_lo + (y_hi - y_lo) * fraction
        y_text = f"1e{y_value:.1f}" if log_y else f"{y_value:.3g}"
        out.append(f'  <line x1="{gx:.2f}" y1="{MARGIN_TOP}" x2="{gx:.2f}" y2="{y0}" class="grid"/>')
        out.append(f'  <line x1="{x0}" y1="{gy:.2f}" x2="{x0 + cw}" y2="{gy:.2f}" class="grid"/>')
        out.append(f'  <text x="{gx:.2f}" y="{y0 + 16}" class="t" text-anchor="middle">{x_value:.3g}</text>')
        out.append(f'  <text x="{x0 - 6}" y="{gy:.2f}" class="t" text-anchor="end">{y_text}</text>')

    if x_label:
        out.append(f'  <text x="{x0 + cw}" y="{y0 + 36}" class="t" text-anchor="end">{x_label}</text>')
    if y_label:
        out.append(f'  <text x="{x0}" y="{MARGIN_TOP - 4}" class="t">{y_label}</text>')

    if xs.size:
        vertices = [f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, plotted)]
        out.append(f'  <path class="line" d="M {" L ".join(vertices)}"/>')

    out.append('</svg>')
    return "\n".join(out) + "\n"


def emit_plot(csv_path: str, kind: str = "line", svg_path: Optional[str] = None) -> str:
    """Menulis SVG di samping CSV (nama sama, ekstensi .svg) dan mengembalikan path-nya"""
    if kind not in PLOT_KINDS:
        raise InvalidArgumentError(f"jenis plot tidak dikenal: {kind}")
    header, xs, ys = _read_series(csv_path)
    title, _, _, x_label, y_label = SCHEMAS[header]
    svg = render_line_svg(title, xs, ys, log_y=(kind == "line_log_y"), x_label=x_label, y_label=y_label)

    svg_path = svg_path or os.path.splitext(csv_path)[0] + ".svg"
    with open(svg_path, "w", newline="\n") as f:
        f.write(svg)
    return svg_path
