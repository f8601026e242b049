"""Discrete curvature of sub-pixel polylines, its smoothing, and extremum detection."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KERNEL = np.array([1.0, 4.0, 8.0, 4.0, 1.0]) / 18.0
FILTER_PASSES = 20
DELTA = 1e-3


@dataclass
class CurvatureProfile:
    raw: np.ndarray
    filtered: np.ndarray | None = None
    extrema: list[int] = field(default_factory=list)


def discrete_curvature(points: np.ndarray) -> CurvatureProfile:
    """Signed inverse circumradius of every triple of consecutive vertices.

    Counter-clockwise convex curves (dark region on the left) get positive
    curvature. A vanishing denominator yields 0.
    """
    p = np.asarray(points, dtype=np.float64)
    prev = np.roll(p, 1, axis=0) - p
    nxt = np.roll(p, -1, axis=0) - p
    det = prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0]
    denom = np.hypot(*prev.T) * np.hypot(*nxt.T) * np.hypot(*(nxt - prev).T)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(denom > 0, -2.0 * det / denom, 0.0)
    return CurvatureProfile(raw=k)


def smooth_profile(profile: CurvatureProfile, passes: int = FILTER_PASSES) -> CurvatureProfile:
    """Apply the 5-tap binomial-like filter ``passes`` times with periodic wrap."""
    k = np.asarray(profile.raw, dtype=np.float64).copy()
    for _ in range(passes):
        k = (KERNEL[2] * k
             + KERNEL[1] * (np.roll(k, 1) + np.roll(k, -1))
             + KERNEL[0] * (np.roll(k, 2) + np.roll(k, -2)))
    return CurvatureProfile(raw=profile.raw, filtered=k, extrema=list(profile.extrema))


def find_extrema(profile: CurvatureProfile, delta: float = DELTA) -> list[int]:
    """Indices whose |filtered curvature| strictly beats its four nearest
    neighbours (cyclically) and exceeds ``delta``."""
    if profile.filtered is None:
        raise ValueError("profile has not been smoothed")
    a = np.abs(profile.filtered)
    mask = a > delta
    for shift in (1, 2, -1, -2):
        mask &= a > np.roll(a, shift)
    return np.flatnonzero(mask).tolist()


def curvature_profile(points: np.ndarray, delta: float = DELTA) -> CurvatureProfile:
    """Raw, filtered and extrema in one call."""
    prof = smooth_profile(discrete_curvature(points))
    prof.extrema = find_extrema(prof, delta)
    return prof
