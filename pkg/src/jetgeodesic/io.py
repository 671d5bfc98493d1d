"""Report, trajectory and figure files.

Floats are written with 17 significant digits so every binary64 value
survives a round trip.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .flow import Trajectory

CANVAS_W, CANVAS_H = 800, 600
MARGIN = 60


def format_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = format(v, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats and stable key order."""
    return _encode(obj, indent, 0) + "\n"


def loads(text: str):
    return json.loads(text)


def write_text(path, text: str) -> None:
    Path(path).write_text(text)


TRAJECTORY_COLUMNS_FIXED = ("t", "x", "p_x")


def trajectory_csv(traj: Trajectory) -> str:
    """Columns t, x, p_x, theta_0..theta_k, energy_drift with a header row."""
    k = traj.f.k
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*TRAJECTORY_COLUMNS_FIXED, *(f"theta_{i}" for i in range(k + 1)), "energy_drift"])
    drift = traj.energy_drift
    for s, d in zip(traj.samples, drift):
        w.writerow([format_float(v) for v in (s.t, s.x, s.p_x, *s.thetas, d)])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.empty((0, len(header)))
    return header, data


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return list(np.linspace(lo, hi, n))


def svg_plot(curves, title: str, xlabel: str, ylabel: str) -> str:
    """Static 800x600 SVG: a framed axis box, tick labels and one polyline per curve.

    ``curves`` is a list of (xs, ys) pairs.
    """
    xs_all = np.concatenate([np.asarray(c[0], dtype=float) for c in curves])
    ys_all = np.concatenate([np.asarray(c[1], dtype=float) for c in curves])
    finite = np.isfinite(xs_all) & np.isfinite(ys_all)
    x0, x1 = (float(xs_all[finite].min()), float(xs_all[finite].max())) if finite.any() else (0.0, 1.0)
    y0, y1 = (float(ys_all[finite].min()), float(ys_all[finite].max())) if finite.any() else (0.0, 1.0)
    if x1 - x0 <= 0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 <= 0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    px0, px1 = MARGIN, CANVAS_W - MARGIN
    py0, py1 = CANVAS_H - MARGIN, MARGIN

    def sx(v):
        return px0 + (v - x0) / (x1 - x0) * (px1 - px0)

    def sy(v):
        return py0 + (v - y0) / (y1 - y0) * (py1 - py0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_W}" height="{CANVAS_H}" '
        f'viewBox="0 0 {CANVAS_W} {CANVAS_H}">',
        f'<rect x="0" y="0" width="{CANVAS_W}" height="{CANVAS_H}" fill="white"/>',
        f'<text x="{CANVAS_W / 2:.1f}" y="30" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" stroke="black"/>',
        f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{sx(v):.2f}" y1="{py0}" x2="{sx(v):.2f}" y2="{py0 + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{py0 + 20}" text-anchor="middle" font-size="11">{v:.4g}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<line x1="{px0 - 5}" y1="{sy(v):.2f}" x2="{px0}" y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{px0 - 8}" y="{sy(v) + 4:.2f}" text-anchor="end" font-size="11">{v:.4g}</text>')
    out.append(f'<text x="{CANVAS_W / 2:.1f}" y="{CANVAS_H - 15}" text-anchor="middle" font-size="13">{xlabel}</text>')
    out.append(f'<text x="15" y="{CANVAS_H / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 15 {CANVAS_H / 2:.1f})">{ylabel}</text>')
    for xs, ys in curves:
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys) if np.isfinite(a) and np.isfinite(b))
        out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
