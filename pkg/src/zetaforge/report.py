"""Serialization of run reports: JSON, a flat CSV mirror, and a small SVG plot."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

CSV_HEADER = ("s_re", "s_im", "det_product_re", "det_product_im", "euler_re", "euler_im", "rel_diff")


def num(x: float) -> float | None:
    """Round to 15 significant digits so reruns serialize identically."""
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return x
    y = float(f"{x:.15g}")
    if math.isinf(y):  # within 1e-15 of the float maximum
        return x
    return y + 0.0  # folds -0.0 into 0.0


def cnum(z: complex) -> dict:
    z = complex(z)
    return {"re": num(z.real), "im": num(z.imag)}


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return cnum(obj)
    return obj


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=True) + "\n"


def write_json(path, obj) -> None:
    _atomic_write(path, dumps(obj))


def grid_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        d, e = complex(r["det_product"]), complex(r["euler_product"])
        w.writerow([repr(num(v)) for v in
                    (r["s"].real, r["s"].imag, d.real, d.imag, e.real, e.imag, r["rel_diff"])])
    return buf.getvalue()


def write_csv(path, rows) -> None:
    _atomic_write(path, grid_csv(rows))


def grid_svg(rows, tol: float, width: int = 480, height: int = 320) -> str:
    """Scatter of log10(rel_diff) over the s-grid: x = Re s, y = Im s, colour = error."""
    pad = 40
    if not rows:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"></svg>\n'
    xs = [r["s"].real for r in rows]
    ys = [r["s"].imag for r in rows]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    logt = math.log10(tol)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#888"/>',
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle">Re s</text>',
        f'<text x="12" y="{height / 2:.0f}" transform="rotate(-90 12 {height / 2:.0f})" '
        'text-anchor="middle">Im s</text>',
        f'<text x="{pad}" y="{pad - 10}">log10 rel_diff (tol 1e{logt:.0f})</text>',
    ]
    for r in rows:
        e = r["rel_diff"]
        le = math.log10(e) if e > 0 else -17.0
        # green well below tol, red at or above it
        frac = min(1.0, max(0.0, (le + 17.0) / (logt + 17.0)))
        colour = f"rgb({int(255 * frac)},{int(180 * (1 - frac))},60)"
        cx = pad + (r["s"].real - x0) * sx
        cy = height - pad - (r["s"].imag - y0) * sy
        parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="7" fill="{colour}">'
                     f'<title>s={r["s"].real:.4g}{r["s"].imag:+.4g}i rel_diff={e:.3e}</title></circle>')
        parts.append(f'<text x="{cx + 9:.1f}" y="{cy + 4:.1f}">{le:.1f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, rows, tol: float) -> None:
    _atomic_write(path, grid_svg(rows, tol))
