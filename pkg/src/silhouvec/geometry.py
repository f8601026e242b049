"""Isoperimetric circle test, circle estimation and the most distant vertex pair."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CIRCLE_GAP = 0.005


@dataclass(frozen=True)
class CircleShape:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("circle radius must be positive")


def area_and_perimeter(curve: np.ndarray) -> tuple[float, float]:
    p = np.asarray(curve, dtype=np.float64)
    q = np.roll(p, -1, axis=0)
    area = 0.5 * abs(float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1])))
    per = float(np.sum(np.hypot(*(q - p).T)))
    return area, per


def isoperimetric_gap(curve: np.ndarray) -> float:
    """``1 - 4 pi A / L^2``; zero for a circle, positive otherwise."""
    a, l = area_and_perimeter(curve)
    if l == 0:
        return 1.0
    return 1.0 - 4.0 * math.pi * a / (l * l)


def circumcenter(a, b, c) -> np.ndarray | None:
    a, b, c = (np.asarray(v, dtype=np.float64) for v in (a, b, c))
    d = 2.0 * ((a[0] - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (a[1] - c[1]))
    scale = max(np.ptp(np.array([a, b, c]), axis=0).max(), 1e-300) ** 2
    if abs(d) <= 1e-12 * scale:
        return None
    a2 = (a - c) @ (a - c)
    b2 = (b - c) @ (b - c)
    ux = (a2 * (b[1] - c[1]) - b2 * (a[1] - c[1])) / d
    uy = (b2 * (a[0] - c[0]) - a2 * (b[0] - c[0])) / d
    return c + np.array([ux, uy])


def point_at_arclength(curve: np.ndarray, start: int, s: float) -> np.ndarray:
    """Point at arclength ``s`` along the closed curve starting at vertex ``start``."""
    p = np.roll(np.asarray(curve, dtype=np.float64), -start, axis=0)
    p = np.vstack([p, p[:1]])
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(p, axis=0).T))])
    s = s % cum[-1]
    k = min(int(np.searchsorted(cum, s, side="right")) - 1, len(p) - 2)
    seg = cum[k + 1] - cum[k]
    f = 0.0 if seg == 0 else (s - cum[k]) / seg
    return p[k] + f * (p[k + 1] - p[k])


def topmost_vertex(curve: np.ndarray) -> int:
    p = np.asarray(curve)
    return int(np.lexsort((p[:, 0], p[:, 1]))[0])


def classify_circle(curve: np.ndarray, gap: float = CIRCLE_GAP) -> CircleShape | None:
    """Circle through three arclength-equidistant outline points, or None.

    The gap test decides; the centre is the circumcentre of the points at
    arclength 0, L/3 and 2L/3 from the top-most vertex, and the radius is
    the mean vertex distance to that centre. A collinear triple shifts the
    start by one vertex.
    """
    p = np.asarray(curve, dtype=np.float64)
    if len(p) < 3 or isoperimetric_gap(p) >= gap:
        return None
    _, L = area_and_perimeter(p)
    start = topmost_vertex(p)
    for shift in range(len(p)):
        i = (start + shift) % len(p)
        tri = [point_at_arclength(p, i, f * L) for f in (0.0, 1.0 / 3.0, 2.0 / 3.0)]
        c = circumcenter(*tri)
        if c is not None:
            r = float(np.mean(np.hypot(*(p - c).T)))
            return CircleShape((float(c[0]), float(c[1])), r)
    return None


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_indices(points: np.ndarray) -> list[int]:
    """Monotone-chain hull, counter-clockwise in the y-up sense, collinear points dropped."""
    p = np.asarray(points, dtype=np.float64)
    order = np.lexsort((p[:, 1], p[:, 0]))
    # drop exact duplicates so the chain never stalls
    uniq = [int(order[0])]
    for i in order[1:]:
        if not np.array_equal(p[i], p[uniq[-1]]):
            uniq.append(int(i))
    if len(uniq) < 3:
        return uniq

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and _cross(p[out[-2]], p[out[-1]], p[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    return lower[:-1] + upper[:-1]


def diameter_indices(points: np.ndarray) -> tuple[int, int]:
    """Vertex indices of a most distant pair via rotating calipers on the hull."""
    p = np.asarray(points, dtype=np.float64)
    if len(p) < 2:
        raise ValueError("need at least two points")
    hull = convex_hull_indices(p)
    h = len(hull)
    if h == 1:
        return hull[0], hull[0]
    if h == 2:
        return hull[0], hull[1]
    H = p[hull]
    best = (-1.0, 0, 0)
    j = 1
    for i in range(h):
        ni = (i + 1) % h
        while abs(_cross(H[i], H[ni], H[(j + 1) % h])) > abs(_cross(H[i], H[ni], H[j])):
            j = (j + 1) % h
        for a in (i, ni):
            for b in (j, (j + 1) % h):
                d = float(np.sum((H[a] - H[b]) ** 2))
                if d > best[0]:
                    best = (d, a, b)
    _, a, b = best
    i0, i1 = sorted((hull[a], hull[b]))
    return i0, i1


def diameter_pair(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    i, j = diameter_indices(points)
    p = np.asarray(points, dtype=np.float64)
    return p[i].copy(), p[j].copy()
