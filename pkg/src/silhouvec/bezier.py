"""Cubic Bezier evaluation, chord-length least-squares fitting and point-to-curve distance.

A cubic is a ``(4, 2)`` array of control points ``b0..b3``; a polygon of
``M`` cubics is an ``(M, 4, 2)`` array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

SINGULAR_TOL = 1e-12
DISTANCE_TOL = 1e-3
SAMPLE_SPACING = 0.25


@dataclass
class BezierPolygon:
    segments: np.ndarray
    closed: bool = True

    def __post_init__(self):
        self.segments = np.asarray(self.segments, dtype=np.float64).reshape(-1, 4, 2)
        seg = self.segments
        if len(seg):
            nxt = np.roll(seg[:, 0], -1, axis=0) if self.closed else seg[1:, 0]
            end = seg[:, 3] if self.closed else seg[:-1, 3]
            if not np.array_equal(end, nxt):
                raise ValueError("consecutive segments must share end points")

    def __len__(self):
        return len(self.segments)


def eval_cubic(c: np.ndarray, s) -> np.ndarray:
    """Point(s) of the cubic at parameter(s) ``s``."""
    c = np.asarray(c, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    r = 1.0 - s
    w = np.stack([r ** 3, 3 * r * r * s, 3 * r * s * s, s ** 3], axis=-1)
    return w @ c


def cubic_derivative(c: np.ndarray, s) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)[..., None]
    d = 3.0 * np.diff(c, axis=0)
    return (1 - s) ** 2 * d[0] + 2 * (1 - s) * s * d[1] + s ** 2 * d[2]


def cubic_second_derivative(c: np.ndarray, s) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)[..., None]
    dd = 6.0 * np.diff(c, n=2, axis=0)
    return (1 - s) * dd[0] + s * dd[1]


def chord_parameters(points: np.ndarray) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(p, axis=0).T))])
    if cum[-1] <= 0:
        return np.linspace(0.0, 1.0, len(p))
    return cum / cum[-1]


def straight_cubic(p0, p3) -> np.ndarray:
    p0 = np.asarray(p0, dtype=np.float64)
    p3 = np.asarray(p3, dtype=np.float64)
    return np.array([p0, p0 + (p3 - p0) / 3.0, p0 + 2.0 * (p3 - p0) / 3.0, p3])


def fit_cubic(points: np.ndarray) -> np.ndarray:
    """Least-squares cubic through the first and last point, chord-length parameters.

    The inner control points come from the 2x2 normal equations; a
    near-singular system falls back to the straight chord.
    """
    p = np.asarray(points, dtype=np.float64)
    p0, p3 = p[0], p[-1]
    if len(p) < 3:
        return straight_cubic(p0, p3)
    t = chord_parameters(p)
    r = 1.0 - t
    a1 = 9.0 * np.sum(t ** 2 * r ** 4)
    a2 = 9.0 * np.sum(t ** 4 * r ** 2)
    a12 = 9.0 * np.sum(t ** 3 * r ** 3)
    rhs = p - np.outer(r ** 3, p0) - np.outer(t ** 3, p3)
    c1 = np.sum((3.0 * t * r ** 2)[:, None] * rhs, axis=0)
    c2 = np.sum((3.0 * t ** 2 * r)[:, None] * rhs, axis=0)
    det = a1 * a2 - a12 ** 2
    if abs(det) <= SINGULAR_TOL * max(a1 * a2, SINGULAR_TOL):
        return straight_cubic(p0, p3)
    b1 = (a2 * c1 - a12 * c2) / det
    b2 = (a1 * c2 - a12 * c1) / det
    return np.array([p0, b1, b2, p3])


def fitting_error(points: np.ndarray, c: np.ndarray) -> float:
    """Sum of squared residuals at the chord-length parameters."""
    p = np.asarray(points, dtype=np.float64)
    res = p - eval_cubic(c, chord_parameters(p))
    return float(np.sum(res * res))


def _samples(c: np.ndarray, spacing: float):
    hull = float(np.sum(np.hypot(*np.diff(c, axis=0).T)))
    n = max(8, int(math.ceil(hull / spacing)))
    s = np.linspace(0.0, 1.0, n + 1)
    return s, eval_cubic(c, s)


def point_distances(points: np.ndarray, c: np.ndarray, spacing: float = SAMPLE_SPACING) -> np.ndarray:
    """Euclidean distance from every point to the cubic ``c``.

    The nearest dense sample (KD-tree lookup) brackets the closest
    parameter; the zero of ``<B(s) - P, B'(s)>`` inside the bracket is then
    found by bisection.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    c = np.asarray(c, dtype=np.float64)
    if len(pts) == 0:
        return np.zeros(0)
    s, samp = _samples(c, spacing)
    best, k = cKDTree(samp).query(pts)
    a = s[np.maximum(k - 1, 0)]
    b = s[np.minimum(k + 1, len(s) - 1)]

    def g(u, P):
        return np.einsum("ij,ij->i", eval_cubic(c, u) - P, cubic_derivative(c, u))

    bracket = (g(a, pts) < 0) & (g(b, pts) > 0)
    if bracket.any():
        aa, bb, PP = a[bracket], b[bracket], pts[bracket]
        for _ in range(40):
            m = 0.5 * (aa + bb)
            left = g(m, PP) < 0
            aa = np.where(left, m, aa)
            bb = np.where(left, bb, m)
        q = eval_cubic(c, 0.5 * (aa + bb))
        best[bracket] = np.minimum(best[bracket], np.hypot(*(q - PP).T))
    return best


def _bbox_lower_bound(points: np.ndarray, c: np.ndarray) -> np.ndarray:
    lo = c.min(axis=0)
    hi = c.max(axis=0)
    dx = np.maximum(np.maximum(lo[0] - points[:, 0], points[:, 0] - hi[0]), 0.0)
    dy = np.maximum(np.maximum(lo[1] - points[:, 1], points[:, 1] - hi[1]), 0.0)
    return np.hypot(dx, dy)


def polygon_distances(points: np.ndarray, segments: np.ndarray,
                      upper: np.ndarray | None = None) -> np.ndarray:
    """Distance from each point to the union of ``segments``.

    ``upper`` (an existing upper bound per point, e.g. the distance to the
    point's own segment) lets the control-polygon bounding box skip
    segments that cannot be closer.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    segs = np.asarray(segments, dtype=np.float64).reshape(-1, 4, 2)
    best = np.full(len(pts), np.inf) if upper is None else np.asarray(upper, dtype=np.float64).copy()
    for c in segs:
        need = _bbox_lower_bound(pts, c) < best
        if need.any():
            best[need] = np.minimum(best[need], point_distances(pts[need], c))
    return best


def max_deviation(outline_points: np.ndarray, polygon: BezierPolygon | np.ndarray) -> tuple[float, int]:
    """Largest distance from an outline point to the polygon, and its index."""
    segs = polygon.segments if isinstance(polygon, BezierPolygon) else np.asarray(polygon)
    if len(segs) == 0:
        raise ValueError("empty Bezier polygon")
    d = polygon_distances(outline_points, segs)
    i = int(np.argmax(d))
    return float(d[i]), i


def max_abs_curvature(c: np.ndarray, samples: int = 33) -> float:
    """Largest |curvature| of the cubic over ``samples`` evenly spaced parameters."""
    s = np.linspace(0.0, 1.0, samples)
    d1 = cubic_derivative(c, s)
    d2 = cubic_second_derivative(c, s)
    cross = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    speed = np.hypot(*d1.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(speed > 1e-12, cross / speed ** 3, 0.0)
    return float(np.max(k))


def flatten_cubic(c: np.ndarray, tol: float = 0.05) -> np.ndarray:
    """Polyline approximating the cubic within ``tol`` (Wang's bound)."""
    c = np.asarray(c, dtype=np.float64)
    dd = np.diff(c, n=2, axis=0)
    m = float(np.max(np.hypot(*dd.T))) if len(dd) else 0.0
    n = max(1, int(math.ceil(math.sqrt(0.75 * m / tol)))) if m > 0 else 1
    return eval_cubic(c, np.linspace(0.0, 1.0, n + 1))
