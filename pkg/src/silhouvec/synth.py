"""Procedural silhouettes used by the test-suite, the evaluation harness and demos.

Every generator returns a binary :class:`RasterImage` (0 inside, 255
outside) obtained by testing pixel centres against an analytic shape.
"""
from __future__ import annotations

import math

import numpy as np

from .raster import RasterImage


def _grid(width, height):
    x = np.arange(width) + 0.5
    y = np.arange(height) + 0.5
    return np.meshgrid(x, y)


def from_mask(mask: np.ndarray) -> RasterImage:
    return RasterImage(np.where(mask, 0.0, 255.0))


def disk(radius=80.0, size=(300, 300), center=None) -> RasterImage:
    w, h = size
    cx, cy = center if center is not None else (w / 2.0, h / 2.0)
    X, Y = _grid(w, h)
    return from_mask((X - cx) ** 2 + (Y - cy) ** 2 <= radius ** 2)


def square(side=240.0, size=(400, 400), center=None, angle=0.0) -> RasterImage:
    w, h = size
    cx, cy = center if center is not None else (w / 2.0, h / 2.0)
    X, Y = _grid(w, h)
    c, s = math.cos(angle), math.sin(angle)
    u = c * (X - cx) + s * (Y - cy)
    v = -s * (X - cx) + c * (Y - cy)
    return from_mask((np.abs(u) <= side / 2.0) & (np.abs(v) <= side / 2.0))


def square_corners(side=240.0, size=(400, 400)):
    w, h = size
    cx, cy = w / 2.0, h / 2.0
    r = side / 2.0
    return np.array([(cx - r, cy - r), (cx + r, cy - r), (cx + r, cy + r), (cx - r, cy + r)])


STADIUM_AREA = 172644.0
STADIUM_PERIMETER = 1742.07


def stadium_dimensions(area=STADIUM_AREA, perimeter=STADIUM_PERIMETER):
    """Radius and straight length of the stadium with the given area and perimeter."""
    disc = perimeter ** 2 - 4 * math.pi * area
    r = (perimeter - math.sqrt(disc)) / (2 * math.pi)
    straight = (perimeter - 2 * math.pi * r) / 2.0
    return r, straight


def stadium(size=(774, 320), radius=None, straight=None, center=None) -> RasterImage:
    """Rectangle capped by two half disks, horizontal."""
    w, h = size
    if radius is None or straight is None:
        radius, straight = stadium_dimensions()
    cx, cy = center if center is not None else (w / 2.0, h / 2.0)
    X, Y = _grid(w, h)
    dx = np.maximum(np.abs(X - cx) - straight / 2.0, 0.0)
    return from_mask(dx ** 2 + (Y - cy) ** 2 <= radius ** 2)


def ellipse(a=120.0, b=60.0, size=(300, 300), angle=0.3) -> RasterImage:
    w, h = size
    X, Y = _grid(w, h)
    c, s = math.cos(angle), math.sin(angle)
    u = c * (X - w / 2.0) + s * (Y - h / 2.0)
    v = -s * (X - w / 2.0) + c * (Y - h / 2.0)
    return from_mask((u / a) ** 2 + (v / b) ** 2 <= 1.0)


def rounded_star(size=(300, 300), r0=85.0, amp=0.35, arms=5) -> RasterImage:
    w, h = size
    X, Y = _grid(w, h)
    dx, dy = X - w / 2.0, Y - h / 2.0
    rho = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    return from_mask(rho <= r0 * (1.0 + amp * np.cos(arms * theta + 0.4)))


def _polyline_distance(X, Y, pts):
    best = np.full(X.shape, np.inf)
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        dx, dy = x1 - x0, y1 - y0
        ll = dx * dx + dy * dy
        t = np.clip(((X - x0) * dx + (Y - y0) * dy) / ll, 0.0, 1.0)
        best = np.minimum(best, np.hypot(X - x0 - t * dx, Y - y0 - t * dy))
    return best


def knot(size=(320, 320), scale=60.0, thickness=11.0) -> RasterImage:
    """Thick trefoil band; the crossings enclose several holes."""
    w, h = size
    t = np.linspace(0, 2 * np.pi, 721)
    x = np.sin(t) + 2 * np.sin(2 * t)
    y = np.cos(t) - 2 * np.cos(2 * t)
    pts = np.column_stack([w / 2.0 + scale * x, h / 2.0 + scale * y + 10.0])
    X, Y = _grid(w, h)
    return from_mask(_polyline_distance(X, Y, pts) <= thickness)


def _inside_polygon(X, Y, poly):
    inside = np.zeros(X.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        crosses = (y0 <= Y) != (y1 <= Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x0 + (Y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (X < xi)
    return inside


def cat(size=(700, 537)) -> RasterImage:
    """Seated cat seen from the side: ears, paws and a curled tail."""
    w, h = size
    sx, sy = w / 700.0, h / 537.0
    X, Y = _grid(w, h)
    X = X / sx
    Y = Y / sy

    def ell(cx, cy, a, b, ang=0.0):
        c, s = math.cos(ang), math.sin(ang)
        u = c * (X - cx) + s * (Y - cy)
        v = -s * (X - cx) + c * (Y - cy)
        return (u / a) ** 2 + (v / b) ** 2 <= 1.0

    body = ell(330, 340, 150, 120)
    chest = ell(250, 290, 80, 110, 0.3)
    head = ell(240, 165, 78, 68)
    ear_l = _inside_polygon(X, Y, [(175, 140), (182, 52), (232, 110)])
    ear_r = _inside_polygon(X, Y, [(250, 105), (300, 48), (305, 140)])
    paw_f = _inside_polygon(X, Y, [(190, 380), (250, 380), (262, 478), (285, 482), (282, 494),
                                   (185, 494), (182, 482), (200, 478)])
    paw_b = _inside_polygon(X, Y, [(330, 420), (420, 400), (430, 478), (468, 484), (466, 494),
                                   (335, 494)])
    t = np.linspace(0.0, 1.0, 120)
    tail_pts = np.column_stack([410 + 200 * t + 40 * np.sin(3.2 * t), 420 - 320 * t ** 1.4])
    tail = _polyline_distance(X, Y, tail_pts) <= 14
    tail_tip = _inside_polygon(X, Y, [(590, 118), (615, 45), (632, 115)])
    mask = body | chest | head | ear_l | ear_r | paw_f | paw_b | tail | tail_tip
    return from_mask(mask)


def suite():
    """The synthetic fixture suite keyed by name."""
    return {
        "disk": disk(),
        "square": square(),
        "stadium": stadium(),
        "ellipse": ellipse(),
        "rounded_star": rounded_star(),
        "knot": knot(),
    }
