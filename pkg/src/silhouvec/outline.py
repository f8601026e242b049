"""Level-line extraction on the bilinear field and uniform resampling.

Curves are plain ``(N, 2)`` float arrays of ``(x, y)`` vertices, implicitly
closed. They are oriented so that the dark side (``u < level``) lies to the
left, which makes outer boundaries counter-clockwise in the ``(x, y)`` frame
(positive shoelace area) and holes clockwise.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateInputError
from .raster import BilinearField

DEFAULT_STEP = 0.25
INTERIOR_SAMPLES = 4
LEVEL_NUDGE = 2.0 ** -20


def signed_area(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=np.float64)
    q = p - p[0]
    x, y = q[:, 0], q[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def perimeter(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=np.float64)
    return float(np.sum(np.hypot(*(np.roll(p, -1, axis=0) - p).T)))


def drop_repeats(points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Remove consecutive (cyclically) coincident vertices."""
    p = np.asarray(points, dtype=np.float64)
    if len(p) < 2:
        return p
    keep = np.hypot(*(p - np.roll(p, 1, axis=0)).T) > tol
    if not keep.any():
        return p[:1]
    return p[keep]


# Corner order around a cell: TL, TR, BR, BL. Edge k joins corner k and k+1.
_CORNER_OFFSETS = ((0, 0), (0, 1), (1, 1), (1, 0))  # (drow, dcol)


def _edge_key(r, c, k):
    if k == 0:
        return ("h", r, c)
    if k == 1:
        return ("v", r, c + 1)
    if k == 2:
        return ("h", r + 1, c)
    return ("v", r, c)


def extract_level_lines(field: BilinearField, level: float = 127.5,
                        interior_samples: int = INTERIOR_SAMPLES) -> list[np.ndarray]:
    """Trace every closed component of ``{u = level}``.

    The raster is padded with one ring of white (255) pixels so that every
    component is a closed curve even when the silhouette touches the frame.
    Output curves are sorted by their topmost-leftmost vertex.
    """
    img = field.source.samples
    if np.any(img == level):
        level = level + LEVEL_NUDGE
    v = np.pad(img, 1, mode="constant", constant_values=255.0)
    inside = v < level
    # pixel (r, c) of the padded grid sits at x = c - 0.5, y = r - 0.5
    code = (inside[:-1, :-1].astype(np.uint8) | (inside[:-1, 1:] << 1)
            | (inside[1:, 1:] << 2) | (inside[1:, :-1] << 3))
    rows, cols = np.nonzero((code != 0) & (code != 15))

    edge_points: dict = {}

    def crossing(key):
        pt = edge_points.get(key)
        if pt is None:
            kind, r, c = key
            va = v[r, c]
            if kind == "h":
                t = (level - va) / (v[r, c + 1] - va)
                pt = (c - 0.5 + t, r - 0.5)
            else:
                t = (level - va) / (v[r + 1, c] - va)
                pt = (c - 0.5, r - 0.5 + t)
            edge_points[key] = pt
        return pt

    links: dict = {}
    for r, c in zip(rows.tolist(), cols.tolist()):
        vals = [v[r + dr, c + dc] for dr, dc in _CORNER_OFFSETS]
        ins = [x < level for x in vals]
        crossing_edges = [k for k in range(4) if ins[k] != ins[(k + 1) % 4]]
        if len(crossing_edges) == 2:
            cut = [(crossing_edges[0], crossing_edges[1], ins.index(True))]
        else:
            centre_inside = sum(vals) / 4.0 < level
            # each segment cuts off one corner; corner k touches edges k-1 and k
            cut = [((k - 1) % 4, k, k) for k in range(4) if ins[k] != centre_inside]
        for e1, e2, corner in cut:
            k1, k2 = _edge_key(r, c, e1), _edge_key(r, c, e2)
            p, q = crossing(k1), crossing(k2)
            cy, cx = r + _CORNER_OFFSETS[corner][0] - 0.5, c + _CORNER_OFFSETS[corner][1] - 0.5
            side = (q[0] - p[0]) * (cy - p[1]) - (q[1] - p[1]) * (cx - p[0])
            if (side > 0) != ins[corner]:
                k1, k2, p, q = k2, k1, q, p
            interior = _hyperbola_points(vals, r - 0.5, c - 0.5, p, q, level, interior_samples)
            links[k1] = (interior, k2)

    curves = []
    for start in sorted(links):
        if start not in links:
            continue
        pts = []
        key = start
        while key in links:
            interior, nxt = links.pop(key)
            pts.append(edge_points[key])
            pts.extend(interior)
            key = nxt
        curve = drop_repeats(np.array(pts, dtype=np.float64))
        if len(curve) >= 3 and signed_area(curve) != 0.0:
            curves.append(curve)
    curves.sort(key=_topmost_leftmost)
    return curves


def _topmost_leftmost(curve: np.ndarray):
    i = np.lexsort((curve[:, 0], curve[:, 1]))[0]
    return (float(curve[i, 1]), float(curve[i, 0]))


def _hyperbola_points(vals, y0, x0, p, q, level, n):
    """Points strictly inside the cell on the level set between ``p`` and ``q``."""
    if n <= 0:
        return []
    v00, v10, v11, v01 = vals  # TL, TR, BR, BL
    sp, tp = p[0] - x0, p[1] - y0
    sq, tq = q[0] - x0, q[1] - y0
    out = []
    if abs(sq - sp) >= abs(tq - tp):
        for k in range(1, n + 1):
            s = sp + (sq - sp) * k / (n + 1)
            den = (v01 - v00) * (1 - s) + (v11 - v10) * s
            if den == 0:
                continue
            t = (level - v00 * (1 - s) - v10 * s) / den
            if 0.0 < t < 1.0:
                out.append((x0 + s, y0 + t))
    else:
        for k in range(1, n + 1):
            t = tp + (tq - tp) * k / (n + 1)
            den = (v10 - v00) * (1 - t) + (v11 - v01) * t
            if den == 0:
                continue
            s = (level - v00 * (1 - t) - v01 * t) / den
            if 0.0 < s < 1.0:
                out.append((x0 + s, y0 + t))
    return out


def resample_uniform(curve: np.ndarray, step: float = DEFAULT_STEP) -> np.ndarray:
    """Resample a closed polyline at equal arclength spacing no larger than ``step``.

    The first vertex is kept; the vertex count is ``ceil(L / step)`` so every
    gap, the closing one included, equals ``L / count``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    p = np.asarray(curve, dtype=np.float64)
    closed = np.vstack([p, p[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if not np.isfinite(total) or total < 3 * step:
        raise DegenerateInputError(f"perimeter {total:.6g} too small for step {step}")
    n = max(3, math.ceil(total / step - 1e-9))
    targets = np.arange(n) * (total / n)
    x = np.interp(targets, cum, closed[:, 0])
    y = np.interp(targets, cum, closed[:, 1])
    return np.column_stack([x, y])
