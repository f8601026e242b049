"""SVG serialization of vectorized outlines and even-odd rasterization.

All components of a silhouette go into one ``<path>`` with the even-odd
rule, so holes need no particular orientation. A circle that neither
contains nor lies inside another component is written as a ``<circle>``
element; otherwise it becomes two half-circle arcs inside the path so the
even-odd rule still applies to it.
"""
from __future__ import annotations

import math
import os
import re
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from . import bezier
from .geometry import CircleShape
from .raster import RasterImage
from .refine import STRAIGHT_KAPPA, VectorOutline

SVG_NS = "http://www.w3.org/2000/svg"
FLATTEN_TOL = 0.05


def fmt(v: float, integer: bool = False) -> str:
    """Locale-free number formatting: integers, or at most three decimals."""
    if integer:
        s = str(int(round(v)))
    else:
        s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _pt(p, integer):
    return f"{fmt(p[0], integer)} {fmt(p[1], integer)}"


def _inside(point, poly: np.ndarray) -> bool:
    x, y = point
    px, py = poly[:, 0], poly[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    crosses = (py <= y) != (qy <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = px + (y - py) * (qx - px) / (qy - py)
    return bool(np.count_nonzero(crosses & (x < xi)) % 2)


def _boundary(o: VectorOutline) -> np.ndarray:
    if o.kind == "circle":
        return circle_polyline(o.circle)
    return polygon_polyline(o.polygon.segments)


def nested_circles(outlines: list[VectorOutline]) -> set[int]:
    """Indices of circles that contain, or sit inside, another component."""
    shapes = [(k, o) for k, o in enumerate(outlines) if o.kind != "empty"]
    polys = {k: _boundary(o) for k, o in shapes}
    out = set()
    for k, o in shapes:
        if o.kind != "circle":
            continue
        cx, cy = o.circle.center
        for j, _ in shapes:
            if j == k:
                continue
            q = polys[j]
            inner = np.hypot(q[0, 0] - cx, q[0, 1] - cy) < o.circle.radius
            if inner or _inside((cx, cy), q):
                out.add(k)
                break
    return out


def path_data(outlines: list[VectorOutline], integer: bool = False,
              straight_kappa: float = STRAIGHT_KAPPA, arc_circles=()) -> str:
    parts = []
    for k, o in enumerate(outlines):
        if o.kind == "bezier":
            segs = o.polygon.segments
            cmd = [f"M {_pt(segs[0][0], integer)}"]
            for c in segs:
                if bezier.max_abs_curvature(c) < straight_kappa:
                    cmd.append(f"L {_pt(c[3], integer)}")
                else:
                    cmd.append(f"C {_pt(c[1], integer)} {_pt(c[2], integer)} {_pt(c[3], integer)}")
            cmd.append("Z")
            parts.append(" ".join(cmd))
        elif o.kind == "circle" and k in arc_circles:
            (cx, cy), r = o.circle.center, o.circle.radius
            rs = fmt(r, integer)
            a = _pt((cx + r, cy), integer)
            b = _pt((cx - r, cy), integer)
            parts.append(f"M {a} A {rs} {rs} 0 1 0 {b} A {rs} {rs} 0 1 0 {a} Z")
    return " ".join(parts)


def svg_text(outlines: list[VectorOutline], width: int, height: int, integer: bool = False,
             straight_kappa: float = STRAIGHT_KAPPA) -> str:
    nested = nested_circles(outlines)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    d = path_data(outlines, integer, straight_kappa, nested)
    if d:
        lines.append(f'<path fill="black" fill-rule="evenodd" d="{d}"/>')
    for k, o in enumerate(outlines):
        if o.kind == "circle" and k not in nested:
            (cx, cy), r = o.circle.center, o.circle.radius
            lines.append(f'<circle cx="{fmt(cx, integer)}" cy="{fmt(cy, integer)}" '
                         f'r="{fmt(r, integer)}" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(outlines: list[VectorOutline], width: int, height: int, path,
              integer: bool = False, straight_kappa: float = STRAIGHT_KAPPA) -> int:
    """Write the document atomically; returns its size in bytes."""
    data = svg_text(outlines, width, height, integer, straight_kappa).encode("utf-8")
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".silhouvec-", suffix=".svg", dir=folder)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(data)


# ---------------------------------------------------------------- reading back

@dataclass
class SvgShapes:
    """Closed polylines (already flattened) and circles read from a document."""

    width: int
    height: int
    rings: list[np.ndarray] = field(default_factory=list)
    circles: list[CircleShape] = field(default_factory=list)


_TOKEN = re.compile(r"[MCLAZmclaz]|[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_ARITY = {"M": 2, "L": 2, "C": 6, "A": 7}


def parse_path(d: str, tol: float = FLATTEN_TOL) -> list[np.ndarray]:
    """Flatten path data using the subset this module writes (absolute M, L, C, A, Z)."""
    if _TOKEN.sub("", d).replace(",", "").strip():
        raise ValueError("unparseable path data")
    tokens = _TOKEN.findall(d)
    rings, ring = [], []
    cur = None
    i = 0
    while i < len(tokens):
        cmd = tokens[i]
        if cmd not in "MCLAZ":
            raise ValueError(f"unsupported path token {cmd!r}")
        i += 1
        if cmd == "Z":
            if ring:
                rings.append(np.array(ring))
            ring = []
            continue
        args = [float(t) for t in tokens[i:i + _ARITY[cmd]]]
        if len(args) != _ARITY[cmd]:
            raise ValueError(f"truncated {cmd} command")
        i += _ARITY[cmd]
        if cmd == "M":
            if ring:
                rings.append(np.array(ring))
            cur = np.array(args)
            ring = [cur]
        elif cur is None:
            raise ValueError("path must start with M")
        elif cmd == "L":
            cur = np.array(args)
            ring.append(cur)
        elif cmd == "C":
            c = np.array([cur, args[0:2], args[2:4], args[4:6]])
            ring.extend(bezier.flatten_cubic(c, tol)[1:])
            cur = c[3]
        else:
            end = np.array(args[5:7])
            ring.extend(_half_arc(cur, end, args[0], int(args[4]), tol)[1:])
            cur = end
    if ring:
        rings.append(np.array(ring))
    return rings


def _half_arc(a, b, r, sweep, tol):
    """Flatten an arc whose end points are (nearly) diametrically opposite."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if abs(np.hypot(*(b - a)) - 2 * r) > max(0.01 * r, 2e-3):
        raise ValueError("only half-circle arcs are supported")
    c = 0.5 * (a + b)
    t0 = math.atan2(a[1] - c[1], a[0] - c[0])
    # sweep=1 runs with increasing angle in the y-down frame
    t1 = t0 + (math.pi if sweep else -math.pi)
    n = _circle_segments(r, tol) // 2 + 1
    t = np.linspace(t0, t1, n + 1)
    return np.column_stack([c[0] + r * np.cos(t), c[1] + r * np.sin(t)])


def read_svg(path) -> SvgShapes:
    """Read a document produced by :func:`write_svg`."""
    root = ET.parse(os.fspath(path)).getroot()
    w = int(round(float(root.get("width"))))
    h = int(round(float(root.get("height"))))
    out = SvgShapes(w, h)
    for el in root.iter():
        tag = el.tag.split("}")[-1]
        if tag == "path":
            out.rings.extend(parse_path(el.get("d", "")))
        elif tag == "circle":
            out.circles.append(CircleShape((float(el.get("cx")), float(el.get("cy"))), float(el.get("r"))))
    return out


# ---------------------------------------------------------------- rasterization

def _circle_segments(r: float, tol: float) -> int:
    if r <= tol:
        return 8
    return max(8, int(math.ceil(math.pi / math.acos(1.0 - tol / r))))


def circle_polyline(circle: CircleShape, tol: float = FLATTEN_TOL) -> np.ndarray:
    n = _circle_segments(circle.radius, tol)
    t = 2 * np.pi * np.arange(n) / n
    cx, cy = circle.center
    return np.column_stack([cx + circle.radius * np.cos(t), cy + circle.radius * np.sin(t)])


def polygon_polyline(segments: np.ndarray, tol: float = FLATTEN_TOL) -> np.ndarray:
    pieces = [bezier.flatten_cubic(c, tol)[:-1] for c in segments]
    return np.vstack(pieces)


def fill_even_odd(rings: list[np.ndarray], width: int, height: int) -> np.ndarray:
    """Boolean mask of pixel centres inside the even-odd union of ``rings``."""
    x0s, y0s, x1s, y1s = [], [], [], []
    for ring in rings:
        r = np.asarray(ring, dtype=np.float64)
        if len(r) < 3:
            continue
        q = np.roll(r, -1, axis=0)
        x0s.append(r[:, 0]); y0s.append(r[:, 1]); x1s.append(q[:, 0]); y1s.append(q[:, 1])
    mask = np.zeros((height, width), dtype=bool)
    if not x0s:
        return mask
    x0, y0, x1, y1 = (np.concatenate(v) for v in (x0s, y0s, x1s, y1s))
    ylo, yhi = np.minimum(y0, y1), np.maximum(y0, y1)
    # rows whose centre j + 0.5 lies in [ylo, yhi)
    j0 = np.clip(np.ceil(ylo - 0.5), 0, height).astype(np.int64)
    j1 = np.clip(np.ceil(yhi - 0.5), 0, height).astype(np.int64)
    cnt = j1 - j0
    keep = cnt > 0
    if not keep.any():
        return mask
    e = np.repeat(np.flatnonzero(keep), cnt[keep])
    rows = np.repeat(j0[keep], cnt[keep]) + (np.arange(len(e)) - np.repeat(np.cumsum(cnt[keep]) - cnt[keep], cnt[keep]))
    yc = rows + 0.5
    xs = x0[e] + (yc - y0[e]) * (x1[e] - x0[e]) / (y1[e] - y0[e])
    order = np.lexsort((xs, rows))
    rows, xs = rows[order], xs[order]
    # pairs of crossings per row: the sort keeps each row's count even
    ra, xa, xb = rows[0::2], xs[0::2], xs[1::2]
    c0 = np.clip(np.ceil(xa - 0.5), 0, width).astype(np.int64)
    c1 = np.clip(np.ceil(xb - 0.5), 0, width).astype(np.int64)
    acc = np.zeros((height, width + 1), dtype=np.int32)
    np.add.at(acc, (ra, c0), 1)
    np.add.at(acc, (ra, c1), -1)
    return np.cumsum(acc, axis=1)[:, :width] > 0


def rasterize_rings(rings, circles, width: int, height: int) -> RasterImage:
    """Paint the path rings (even-odd) and then each separate circle."""
    mask = fill_even_odd(rings, width, height)
    for c in circles:
        mask |= fill_even_odd([circle_polyline(c)], width, height)
    return RasterImage(np.where(mask, 0.0, 255.0))


def rasterize(outlines: list[VectorOutline], width: int, height: int) -> RasterImage:
    """Binary raster (0 inside, 255 outside) of the document ``svg_text`` would write."""
    nested = nested_circles(outlines)
    rings, circles = [], []
    for k, o in enumerate(outlines):
        if o.kind == "bezier":
            rings.append(polygon_polyline(o.polygon.segments))
        elif o.kind == "circle" and k in nested:
            rings.append(circle_polyline(o.circle))
        elif o.kind == "circle":
            circles.append(o.circle)
    return rasterize_rings(rings, circles, width, height)


def rasterize_svg(path) -> RasterImage:
    doc = read_svg(path)
    return rasterize_rings(doc.rings, doc.circles, doc.width, doc.height)
