"""CSV, JSON and SVG output.

Floats go out as shortest round-trip decimals in JSON and with nine
significant digits in CSV and SVG, so reruns with the same seed give
byte-identical files.  Every file is written to a temporary name next to the
target and renamed into place.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

import numpy as np


def fmt9(x) -> str:
    return f"{float(x):.9g}"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def json_text(obj) -> str:
    return json.dumps(_plain(obj), indent=1) + "\n"


def write_json(path: str, obj) -> None:
    write_atomic(path, json_text(obj))


def csv_text(header: list, rows, meta: dict | None = None) -> str:
    lines = [f"# {k}={v}" for k, v in (meta or {}).items()]
    lines.append(",".join(header))
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(fmt9(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: list, rows, meta: dict | None = None) -> None:
    write_atomic(path, csv_text(header, rows, meta))


def _svg_open(width, height, meta: dict | None) -> list:
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    if meta:
        items = " ".join(f"{k}={v}" for k, v in meta.items())
        out.append(f"<metadata>{items}</metadata>")
    return out


def svg_scatter(xs, ys, xlabel: str = "x", ylabel: str = "y", meta: dict | None = None,
                width: int = 480, height: int = 320, logy: bool = False) -> str:
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if logy:
        ys = np.log10(np.maximum(ys, 1e-300))
        ylabel = f"log10 {ylabel}"
    pad = 40.0
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = (width - 2 * pad) / (x1 - x0 or 1.0)
    sy = (height - 2 * pad) / (y1 - y0 or 1.0)
    out = _svg_open(width, height, meta)
    out.append(f'<rect x="{fmt9(pad)}" y="{fmt9(pad)}" width="{fmt9(width - 2 * pad)}" '
               f'height="{fmt9(height - 2 * pad)}" fill="none" stroke="black"/>')
    for x, y in zip(xs, ys):
        cx = pad + (x - x0) * sx
        cy = height - pad - (y - y0) * sy
        out.append(f'<circle cx="{fmt9(cx)}" cy="{fmt9(cy)}" r="2" fill="#3182bd"/>')
    out.append(f'<text x="{fmt9(width / 2)}" y="{fmt9(height - 8)}" font-size="11" '
               f'text-anchor="middle">{xlabel} [{fmt9(x0)}, {fmt9(x1)}]</text>')
    out.append(f'<text x="12" y="{fmt9(height / 2)}" font-size="11" '
               f'transform="rotate(-90 12 {fmt9(height / 2)})" text-anchor="middle">'
               f'{ylabel} [{fmt9(y0)}, {fmt9(y1)}]</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ramp(t: float) -> str:
    # blue -> white -> red, linear in t in [0, 1]
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        s = t / 0.5
        r, g, b = int(255 * s), int(255 * s), 255
    else:
        s = (t - 0.5) / 0.5
        r, g, b = 255, int(255 * (1 - s)), int(255 * (1 - s))
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_heatmap(vertices, triangles, values, meta: dict | None = None, size: int = 480) -> str:
    """Flat-shaded triangles coloured by the mean nodal value on a linear scale."""
    V = np.asarray(vertices, float)
    T = np.asarray(triangles, int)
    vals = np.asarray(values, float)[T].mean(axis=1)
    vmax = float(np.abs(vals).max()) or 1.0
    pad = 10.0
    lo, hi = V.min(axis=0), V.max(axis=0)
    sc = (size - 2 * pad) / float(max(hi - lo))
    height = int(np.ceil((hi[1] - lo[1]) * sc + 2 * pad))
    meta = dict(meta or {})
    meta["color_scale"] = f"linear[-{fmt9(vmax)},{fmt9(vmax)}]"
    out = _svg_open(size, height, meta)
    for tri, v in zip(T, vals):
        pts = " ".join(f"{fmt9(pad + (V[i, 0] - lo[0]) * sc)},{fmt9(height - pad - (V[i, 1] - lo[1]) * sc)}"
                       for i in tri)
        out.append(f'<polygon points="{pts}" fill="{_ramp(0.5 + 0.5 * v / vmax)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_development(triangles, polyline, meta: dict | None = None, size: int = 480) -> str:
    """Unfolded triangles of a trajectory with the straight orbit on top."""
    pts = np.array([p for tri in triangles for p in tri] + list(polyline), float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = 10.0
    sc = (size - 2 * pad) / float(max(hi - lo) or 1.0)
    height = int(np.ceil((hi[1] - lo[1]) * sc + 2 * pad))

    def xy(p):
        return f"{fmt9(pad + (p[0] - lo[0]) * sc)},{fmt9(height - pad - (p[1] - lo[1]) * sc)}"

    out = _svg_open(size, height, meta)
    for tri in triangles:
        out.append(f'<polygon points="{" ".join(xy(p) for p in tri)}" fill="none" stroke="#bbbbbb"/>')
    out.append(f'<polyline points="{" ".join(xy(p) for p in polyline)}" fill="none" stroke="#d62728"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
