"""Serialization of reports (JSON/CSV at 17 significant digits) and SVG scenes.

17 significant decimal digits round-trip IEEE-754 doubles exactly, so a
written report reproduces the in-memory numbers bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .capacity import CapacityEstimate, GreenEstimate
from .covering import CoveringVerdict
from .inequalities import BoundReport


def fmt_float(x: float) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if np.isnan(x):
        return "NaN"
    if np.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def to_json_text(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits; complex as [re, im]."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{fmt_float(obj.real)}, {fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, dict):
        items = [
            f'{pad}  "{k}": {to_json_text(v, indent + 1)}' for k, v in obj.items()
        ]
        if not items:
            return "{}"
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}  {to_json_text(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


_CSV_COLUMNS = {
    BoundReport: ["inequality_id", "lhs", "rhs", "slack", "hypothesis",
                  "map", "z1_re", "z1_im", "z2_re", "z2_im", "parameter"],
    CoveringVerdict: ["status", "family", "curve_samples", "family_samples",
                      "witness_re", "witness_im", "witness_preimages"],
    CapacityEstimate: ["value", "method", "error_bar", "discretization"],
    GreenEstimate: ["value", "stderr", "walks"],
}


def _csv_row(item) -> list:
    if isinstance(item, BoundReport):
        z1 = item.inputs.get("z1", ["", ""])
        z2 = item.inputs.get("z2", ["", ""])
        param = item.inputs.get("lambda", item.inputs.get("rho", ""))
        return [item.inequality_id, item.lhs, item.rhs, item.slack,
                item.hypothesis, item.inputs.get("map", ""),
                z1[0], z1[1], z2[0], z2[1], param]
    if isinstance(item, CoveringVerdict):
        w = item.witness.w if item.witness else None
        return [item.status, item.family, item.resolution[0], item.resolution[1],
                "" if w is None else w.real, "" if w is None else w.imag,
                "" if item.witness is None else len(item.witness.preimages)]
    if isinstance(item, CapacityEstimate):
        disc = ";".join(f"{k}={v}" for k, v in item.discretization.items())
        return [item.value, item.method,
                "" if item.error_bar is None else item.error_bar, disc]
    if isinstance(item, GreenEstimate):
        return [item.value, item.stderr, item.walks]
    raise TypeError(f"unsupported result type {type(item).__name__}")


def _csv_cell(v) -> str:
    if isinstance(v, str):
        if any(ch in v for ch in ",\"\n"):
            return '"' + v.replace('"', '""') + '"'
        return v
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def emit_report(results, fmt: str, path=None) -> str:
    """Serialize a homogeneous list of results to JSON or CSV text.

    Mixing result types in one report is rejected.
    """
    results = list(results)
    if not results:
        raise ValueError("results must be nonempty")
    kinds = {type(r) for r in results}
    if len(kinds) > 1:
        raise ValueError(
            "mixed result types in one report: "
            + ", ".join(sorted(k.__name__ for k in kinds))
        )
    kind = kinds.pop()
    if kind not in _CSV_COLUMNS:
        raise TypeError(f"unsupported result type {kind.__name__}")
    if fmt == "json":
        text = to_json_text([r.to_json_dict() for r in results]) + "\n"
    elif fmt == "csv":
        lines = [",".join(_CSV_COLUMNS[kind])]
        for r in results:
            lines.append(",".join(_csv_cell(v) for v in _csv_row(r)))
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError("format must be 'json' or 'csv'")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ----------------------------------------------------------------------------
# SVG scenes

@dataclass
class SvgScene:
    """Curves, marked points, an optional domain outline, and an optional
    scalar field rendered as a coarse rectangle raster."""

    curves: list = field(default_factory=list)       # complex polylines
    points: list = field(default_factory=list)       # complex markers
    outline: Optional[np.ndarray] = None             # complex polyline
    field_values: Optional[np.ndarray] = None        # 2D array (may hold NaN)
    field_box: Optional[tuple] = None                # (x0, x1, y0, y1)

    def is_empty(self) -> bool:
        return not self.curves and not self.points and self.outline is None \
            and self.field_values is None


def _scene_bounds(scene: SvgScene):
    xs, ys = [], []
    for c in list(scene.curves) + ([scene.outline] if scene.outline is not None else []):
        arr = np.asarray(c, dtype=np.complex128)
        xs.extend([arr.real.min(), arr.real.max()])
        ys.extend([arr.imag.min(), arr.imag.max()])
    for p in scene.points:
        xs.append(complex(p).real)
        ys.append(complex(p).imag)
    if scene.field_box is not None:
        x0, x1, y0, y1 = scene.field_box
        xs.extend([x0, x1])
        ys.extend([y0, y1])
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    mx = 0.05 * max(x1 - x0, y1 - y0, 1e-12)
    return x0 - mx, x1 + mx, y0 - mx, y1 + mx


def _path_data(points, digits=12) -> str:
    pts = np.asarray(points, dtype=np.complex128).ravel()
    fmt = f"%.{digits}g"
    bits = [f"M {fmt % pts[0].real} {fmt % pts[0].imag}"]
    bits.extend(f"L {fmt % p.real} {fmt % p.imag}" for p in pts[1:])
    return " ".join(bits)


def emit_svg(scene: SvgScene, path) -> str:
    """Standalone SVG 1.1 document; viewBox fitted with a 5% margin."""
    if scene.is_empty():
        raise ValueError("scene is empty")
    x0, x1, y0, y1 = _scene_bounds(scene)
    w, h = x1 - x0, y1 - y0
    sw = 0.004 * max(w, h)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}" '
        f'width="640" height="{640 * h / w:.6g}">',
        # math orientation: flip the y axis about the viewBox center line
        f'<g transform="translate(0 {y0 + y1:.6g}) scale(1 -1)">',
    ]
    if scene.field_values is not None:
        vals = np.asarray(scene.field_values, dtype=float)
        fx0, fx1, fy0, fy1 = scene.field_box
        step = max(1, max(vals.shape) // 64)
        coarse = vals[::step, ::step]
        finite = coarse[np.isfinite(coarse)]
        lo = finite.min() if finite.size else 0.0
        hi = finite.max() if finite.size else 1.0
        span = hi - lo if hi > lo else 1.0
        cw = (fx1 - fx0) / coarse.shape[1]
        ch = (fy1 - fy0) / coarse.shape[0]
        for i in range(coarse.shape[0]):
            for j in range(coarse.shape[1]):
                v = coarse[i, j]
                if not np.isfinite(v):
                    continue
                shade = int(round(255 * (v - lo) / span))
                parts.append(
                    f'<rect x="{fx0 + j * cw:.6g}" y="{fy0 + i * ch:.6g}" '
                    f'width="{cw:.6g}" height="{ch:.6g}" '
                    f'fill="rgb({shade},{shade},{255 - shade})" stroke="none"/>'
                )
    if scene.outline is not None:
        parts.append(
            f'<path d="{_path_data(scene.outline)}" fill="none" '
            f'stroke="#888" stroke-width="{sw:.6g}"/>'
        )
    for c in scene.curves:
        parts.append(
            f'<path d="{_path_data(c)}" fill="none" stroke="#000" '
            f'stroke-width="{sw:.6g}"/>'
        )
    for p in scene.points:
        p = complex(p)
        parts.append(
            f'<circle cx="{p.real:.12g}" cy="{p.imag:.12g}" r="{2 * sw:.6g}" '
            f'fill="#c00" stroke="none"/>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
