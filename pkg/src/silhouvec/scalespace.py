"""Affine scale-space ladder and coarse-to-fine backtracing of curvature extrema."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .curvature import DELTA, CurvatureProfile, curvature_profile
from .flow import DEFAULT_SIGMA_STEP, evolve, scale_time
from .outline import DEFAULT_STEP

log = logging.getLogger(__name__)

DELTA_SIGMA = 0.5
LEVELS = 4
DISTANCE_BOUND = 10.0
DIRECTION_THRESHOLD = 0.9

SCALE_SPACE = "scale-space"
DISTANT_PAIR = "distant-pair"
INSERTED = "inserted"
SUPPLIED = "supplied"


class VanishedComponent(Exception):
    """The curve disappeared under the flow before the requested scale."""


@dataclass
class ScaleLadder:
    scales: list[float]
    curves: list[np.ndarray]
    profiles: list[CurvatureProfile]

    @property
    def K(self) -> int:
        return len(self.scales) - 1

    def extremum_counts(self) -> list[int]:
        return [len(p.extrema) for p in self.profiles]


@dataclass
class TraceSequence:
    origin: int
    points: list[int]
    complete: bool


@dataclass
class ControlPointSet:
    """Control points on the outline, kept sorted by outline index."""

    indices: list[int] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.provenance:
            self.provenance = [SUPPLIED] * len(self.indices)
        if len(self.provenance) != len(self.indices):
            raise ValueError("one provenance label per control point")
        order = sorted(range(len(self.indices)), key=lambda k: self.indices[k])
        self.indices = [int(self.indices[k]) for k in order]
        self.provenance = [self.provenance[k] for k in order]

    def __len__(self):
        return len(self.indices)

    def points(self, outline: np.ndarray) -> np.ndarray:
        return np.asarray(outline)[self.indices].reshape(-1, 2)

    def add(self, index: int, provenance: str) -> None:
        if index in self.indices:
            return
        pos = int(np.searchsorted(self.indices, index))
        self.indices.insert(pos, int(index))
        self.provenance.insert(pos, provenance)

    def remove(self, positions) -> None:
        drop = set(positions)
        keep = [k for k in range(len(self.indices)) if k not in drop]
        self.indices = [self.indices[k] for k in keep]
        self.provenance = [self.provenance[k] for k in keep]

    def copy(self) -> "ControlPointSet":
        return ControlPointSet(list(self.indices), list(self.provenance))


def build_ladder(outline: np.ndarray, delta_sigma: float = DELTA_SIGMA, K: int = LEVELS,
                 delta: float = DELTA, max_sigma: float = DEFAULT_SIGMA_STEP,
                 step: float = DEFAULT_STEP) -> ScaleLadder:
    """Evolve ``outline`` to scales ``k * delta_sigma`` and profile each curve.

    Consecutive rungs are reached by evolving the previous rung for the
    difference in flow time, so rung ``k`` carries flow time
    ``scale_time(k * delta_sigma)`` from the input.
    """
    if delta_sigma <= 0 or K < 1:
        raise ValueError("delta_sigma must be positive and K >= 1")
    scales = [k * delta_sigma for k in range(K + 1)]
    curves = [np.asarray(outline, dtype=np.float64)]
    for k in range(1, K + 1):
        dt = scale_time(scales[k]) - scale_time(scales[k - 1])
        nxt = evolve(curves[-1], dt, max_sigma, step)
        if nxt is None:
            raise VanishedComponent(f"curve vanished before scale {scales[k]}")
        curves.append(nxt)
    profiles = [curvature_profile(c, delta) for c in curves]
    counts = [len(p.extrema) for p in profiles]
    if any(b > a for a, b in zip(counts, counts[1:])):
        log.warning("extremum count increased along the ladder: %s", counts)
    return ScaleLadder(scales=scales, curves=curves, profiles=profiles)


def extremum_position(curve: np.ndarray, filtered: np.ndarray, i: int) -> np.ndarray:
    """Sub-vertex location of the extremum at vertex ``i``.

    A parabola through ``|k|`` at ``i - 1, i, i + 1`` places the peak
    within half a sampling step of the vertex.
    """
    n = len(curve)
    a_m, a_0, a_p = np.abs(filtered[[(i - 1) % n, i, (i + 1) % n]])
    den = a_m - 2.0 * a_0 + a_p
    off = 0.5 * (a_m - a_p) / den if den < 0 else 0.0
    off = float(np.clip(off, -0.5, 0.5))
    nb = curve[(i + 1) % n] if off >= 0 else curve[(i - 1) % n]
    return curve[i] + abs(off) * (nb - curve[i])


def inverse_direction(curve: np.ndarray, filtered: np.ndarray, i: int) -> np.ndarray:
    """Unit vector ``-sign(k) N`` at vertex ``i``; ``N`` is the left normal."""
    n = len(curve)
    t = curve[(i + 1) % n] - curve[(i - 1) % n]
    norm = np.hypot(*t)
    if norm == 0:
        return np.zeros(2)
    left = np.array([-t[1], t[0]]) / norm
    return -np.sign(filtered[i]) * left


def backtrace_step(x_coarse: np.ndarray, direction: np.ndarray, candidates: np.ndarray,
                   D: float = DISTANCE_BOUND, alpha: float = DIRECTION_THRESHOLD,
                   order: np.ndarray | None = None) -> int | None:
    """Pick the candidate best aligned with ``direction`` from ``x_coarse``.

    Admissible candidates lie closer than ``D`` and have direction cosine
    above ``alpha``; a candidate sitting exactly on ``x_coarse`` counts as
    aligned. Ties on the cosine go to the nearest candidate, then
    to the smallest ``order`` value (outline index). Returns the position
    in ``candidates`` or None.
    """
    cand = np.asarray(candidates, dtype=np.float64).reshape(-1, 2)
    if len(cand) == 0:
        return None
    diff = cand - np.asarray(x_coarse, dtype=np.float64)
    dist = np.hypot(diff[:, 0], diff[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.where(dist > 0, diff @ np.asarray(direction, dtype=np.float64) / dist, 1.0)
    ok = (dist < D) & (cos > alpha)
    if not ok.any():
        return None
    if order is None:
        order = np.arange(len(cand))
    idx = np.flatnonzero(ok)
    best = np.lexsort((np.asarray(order)[idx], dist[idx], -cos[idx]))[0]
    return int(idx[best])


def trace_sequences(ladder: ScaleLadder, D: float = DISTANCE_BOUND,
                    alpha: float = DIRECTION_THRESHOLD) -> list[TraceSequence]:
    K = ladder.K
    out = []
    for origin in ladder.profiles[K].extrema:
        seq = [origin]
        k = K
        current = origin
        while k >= 1:
            curve = ladder.curves[k]
            direction = inverse_direction(curve, ladder.profiles[k].filtered, current)
            fine_idx = np.asarray(ladder.profiles[k - 1].extrema, dtype=np.intp)
            fine_pts = np.array([extremum_position(ladder.curves[k - 1], ladder.profiles[k - 1].filtered, j)
                                 for j in fine_idx]).reshape(-1, 2)
            here = extremum_position(curve, ladder.profiles[k].filtered, current)
            hit = backtrace_step(here, direction, fine_pts, D, alpha, order=fine_idx)
            if hit is None:
                break
            current = int(fine_idx[hit])
            seq.append(current)
            k -= 1
        out.append(TraceSequence(origin=origin, points=seq, complete=len(seq) == K + 1))
    return out


def candidate_control_points(ladder: ScaleLadder, D: float = DISTANCE_BOUND,
                             alpha: float = DIRECTION_THRESHOLD) -> ControlPointSet:
    """End points (on the finest curve) of all complete trace sequences."""
    H = ControlPointSet()
    for seq in trace_sequences(ladder, D, alpha):
        if seq.complete:
            H.add(seq.points[-1], SCALE_SPACE)
    return H
