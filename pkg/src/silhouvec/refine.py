"""Control-point refinement and the per-component vectorization driver.

The fitted curve ``sigma`` is the outline after smoothing to ``sigma0``;
control points are vertex indices into it. Segment ``k`` runs from
``H[k]`` to ``H[k + 1]`` (the last one wraps around to ``H[0]``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import bezier
from .bezier import BezierPolygon
from .curvature import DELTA
from .flow import DEFAULT_SIGMA_STEP, shorten
from .geometry import CircleShape, classify_circle, diameter_indices
from .outline import DEFAULT_STEP
from .scalespace import (DELTA_SIGMA, DIRECTION_THRESHOLD, DISTANCE_BOUND, DISTANT_PAIR, INSERTED,
                         LEVELS, SCALE_SPACE, ControlPointSet, VanishedComponent, build_ladder,
                         candidate_control_points)

log = logging.getLogger(__name__)

MIN_VERTICES = 8
EPSILON_FLAT = 0.05
STRAIGHT_KAPPA = 1e-3


@dataclass(frozen=True)
class VectorizeParams:
    tau_e: float = 1.0
    sigma0: float = 1.0
    level: float = 127.5
    delta_sigma: float = DELTA_SIGMA
    K: int = LEVELS
    D: float = DISTANCE_BOUND
    alpha: float = DIRECTION_THRESHOLD
    epsilon_flat: float = EPSILON_FLAT
    merge: bool = False
    straight_kappa: float = STRAIGHT_KAPPA
    delta: float = DELTA
    step: float = DEFAULT_STEP
    max_sigma: float = DEFAULT_SIGMA_STEP

    def __post_init__(self):
        if not self.tau_e > 0:
            raise ValueError("tau_e must be positive")
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be non-negative")
        if not 0 < self.level < 255:
            raise ValueError("level must lie strictly between 0 and 255")
        if self.delta_sigma <= 0 or self.K < 1 or self.D <= 0:
            raise ValueError("ladder parameters must be positive")
        if not -1 <= self.alpha <= 1:
            raise ValueError("alpha must be a cosine")
        if self.epsilon_flat < 0:
            raise ValueError("epsilon_flat must be non-negative")


@dataclass
class VectorOutline:
    """Result for one component: ``kind`` is ``"bezier"``, ``"circle"`` or ``"empty"``."""

    kind: str
    curve: np.ndarray | None = None
    polygon: BezierPolygon | None = None
    controls: ControlPointSet | None = None
    circle: CircleShape | None = None
    candidates: int = 0
    info: dict = field(default_factory=dict)

    @property
    def control_count(self) -> int:
        return len(self.controls) if self.controls is not None else 0

    def control_points(self) -> np.ndarray:
        if self.controls is None or self.curve is None:
            return np.zeros((0, 2))
        return self.controls.points(self.curve)

    def feature_points(self) -> np.ndarray:
        """Control points, or the centre for a circle."""
        if self.kind == "circle":
            return np.array([self.circle.center])
        return self.control_points()


def segment_runs(n: int, indices) -> list[np.ndarray]:
    """Vertex index runs between consecutive control points (inclusive ends, cyclic)."""
    H = list(indices)
    runs = []
    for k, a in enumerate(H):
        b = H[(k + 1) % len(H)]
        if b <= a:
            b += n
        runs.append(np.arange(a, b + 1) % n)
    return runs


def fit_piece(points: np.ndarray, straight_kappa: float | None = STRAIGHT_KAPPA) -> np.ndarray:
    """Least-squares cubic, replaced by its chord when nearly straight.

    Straightening here (rather than only when writing) keeps the accuracy
    check honest about the geometry that ends up in the file.
    """
    c = bezier.fit_cubic(points)
    if straight_kappa is not None and bezier.max_abs_curvature(c) < straight_kappa:
        return bezier.straight_cubic(c[0], c[3])
    return c


def fit_segments(curve: np.ndarray, indices,
                 straight_kappa: float | None = STRAIGHT_KAPPA) -> np.ndarray:
    p = np.asarray(curve, dtype=np.float64)
    if len(indices) == 0:
        return np.zeros((0, 4, 2))
    return np.array([fit_piece(p[r], straight_kappa) for r in segment_runs(len(p), indices)])


def tangents_at_controls(curve: np.ndarray, indices, segments: np.ndarray | None = None):
    """``(T_minus, T_plus)`` arrays, one row per control point.

    A vanishing tangent (a degenerate segment) is replaced by the direction
    to the neighbouring outline vertex.
    """
    p = np.asarray(curve, dtype=np.float64)
    n = len(p)
    H = list(indices)
    if segments is None:
        segments = fit_segments(p, H, straight_kappa=None)
    M = len(H)
    t_plus = np.empty((M, 2))
    t_minus = np.empty((M, 2))
    for i, j in enumerate(H):
        o = p[j]
        tp = segments[i][1] - o
        tm = segments[(i - 1) % M][2] - o
        if np.hypot(*tp) < 1e-12:
            tp = p[(j + 1) % n] - o
        if np.hypot(*tm) < 1e-12:
            tm = p[(j - 1) % n] - o
        t_plus[i] = tp
        t_minus[i] = tm
    return t_minus, t_plus


def flatness(t_minus: np.ndarray, t_plus: np.ndarray) -> np.ndarray:
    """``cos(angle(T-, T+)) + 1``; near 0 when the point sits on a smooth stretch."""
    num = np.einsum("ij,ij->i", t_plus, t_minus)
    den = np.hypot(*t_plus.T) * np.hypot(*t_minus.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(den > 0, num / den, -1.0)
    return c + 1.0


def delete_flat(curve: np.ndarray, H: ControlPointSet,
                epsilon_flat: float = EPSILON_FLAT) -> ControlPointSet:
    """Drop every control point whose tangents are nearly opposite, until none is."""
    H = H.copy()
    while len(H):
        if len(H) == 1:
            # a lone point only bounds a self-loop; let the degenerate path seed it
            H.remove([0])
            break
        t_minus, t_plus = tangents_at_controls(curve, H.indices)
        flat = np.flatnonzero(flatness(t_minus, t_plus) < epsilon_flat)
        if len(flat) == 0:
            break
        H.remove(flat.tolist())
    return H


class _Fitter:
    """Cached cubics and per-point distances to each point's own segment."""

    def __init__(self, curve: np.ndarray, H: ControlPointSet, straight_kappa: float | None):
        self.p = np.asarray(curve, dtype=np.float64)
        self.H = H
        self.straight_kappa = straight_kappa
        self.segs: list[np.ndarray] = []
        self.own: list[np.ndarray] = []
        for r in segment_runs(len(self.p), H.indices):
            self._append(r)

    def _fit(self, run):
        c = fit_piece(self.p[run], self.straight_kappa)
        return c, bezier.point_distances(self.p[run], c)

    def _append(self, run):
        c, d = self._fit(run)
        self.segs.append(c)
        self.own.append(d)

    def worst(self, tau_e: float):
        """Largest true distance among points whose own-segment distance exceeds ``tau_e``."""
        n = len(self.p)
        runs = segment_runs(n, self.H.indices)
        idx = np.concatenate(runs)
        own = np.concatenate(self.own)
        sel = own > tau_e
        if not sel.any():
            return 0.0, None
        cand = idx[sel]
        d = bezier.polygon_distances(self.p[cand], np.array(self.segs), upper=own[sel])
        k = int(np.argmax(d))
        if d[k] <= tau_e:
            return float(d[k]), None
        return float(d[k]), int(cand[k])


def insert_until(curve: np.ndarray, H: ControlPointSet, tau_e: float,
                 straight_kappa: float | None = STRAIGHT_KAPPA) -> ControlPointSet:
    """Add the farthest outline point while the polygon misses the outline by more than ``tau_e``."""
    H = H.copy()
    if len(H) == 0:
        raise ValueError("insertion needs at least one control point")
    fitter = _Fitter(curve, H, straight_kappa)
    while True:
        _, index = fitter.worst(tau_e)
        if index is None:
            return fitter.H
        fitter = _refit_after_insert(fitter, index)


def _refit_after_insert(fitter: _Fitter, index: int) -> _Fitter:
    n = len(fitter.p)
    old = list(fitter.H.indices)
    fitter.H.add(index, INSERTED)
    H = fitter.H.indices
    pos = H.index(index)
    M = len(H)
    runs = segment_runs(n, H)
    new_segs, new_own = [], []
    for k in range(M):
        if k == (pos - 1) % M or k == pos:
            c, d = fitter._fit(runs[k])
        else:
            # unchanged segment: same start point as in the old list
            j = old.index(H[k])
            c, d = fitter.segs[j], fitter.own[j]
        new_segs.append(c)
        new_own.append(d)
    fitter.segs, fitter.own = new_segs, new_own
    return fitter


def merge_segments(curve: np.ndarray, H: ControlPointSet, tau_e: float,
                   straight_kappa: float | None = STRAIGHT_KAPPA) -> ControlPointSet:
    """One cyclic pass deleting control points whose two segments fit one cubic within ``tau_e``."""
    p = np.asarray(curve, dtype=np.float64)
    n = len(p)
    H = H.copy()
    if len(H) < 3:
        return H
    idx = list(H.indices)
    keep = [True] * len(idx)
    M = len(idx)
    prev = M - 1
    for i in range(M):
        if sum(keep) <= 2:
            break
        nxt = (i + 1) % M
        while not keep[nxt]:
            nxt = (nxt + 1) % M
        a, b = idx[prev], idx[nxt]
        if b <= a:
            b += n
        run = np.arange(a, b + 1) % n
        c = fit_piece(p[run], straight_kappa)
        if float(np.max(bezier.point_distances(p[run], c))) < tau_e:
            keep[i] = False
        else:
            prev = i
    H.remove([k for k in range(M) if not keep[k]])
    return H


def _degenerate(curve: np.ndarray) -> tuple[CircleShape | None, ControlPointSet]:
    circle = classify_circle(curve)
    if circle is not None:
        return circle, ControlPointSet()
    H = ControlPointSet()
    i, j = diameter_indices(curve)
    H.add(i, DISTANT_PAIR)
    H.add(j, DISTANT_PAIR)
    return None, H


def _straight_polygon(curve: np.ndarray) -> VectorOutline:
    p = np.asarray(curve, dtype=np.float64)
    H = ControlPointSet(list(range(len(p))), [INSERTED] * len(p))
    segs = np.array([bezier.straight_cubic(p[k], p[(k + 1) % len(p)]) for k in range(len(p))])
    return VectorOutline("bezier", curve=p, polygon=BezierPolygon(segs), controls=H,
                         info={"path": "tiny"})


def vectorize(outline: np.ndarray, params: VectorizeParams = VectorizeParams()) -> VectorOutline:
    """Vectorize one resampled closed outline."""
    raw = np.asarray(outline, dtype=np.float64)
    if len(raw) < MIN_VERTICES:
        return _straight_polygon(raw)
    curve = shorten(raw, params.sigma0, params.max_sigma, params.step) if params.sigma0 > 0 else raw
    if curve is None:
        return VectorOutline("empty", info={"path": "vanished"})
    if len(curve) < MIN_VERTICES:
        return _straight_polygon(curve)

    try:
        ladder = build_ladder(curve, params.delta_sigma, params.K, params.delta,
                              params.max_sigma, params.step)
        H = candidate_control_points(ladder, params.D, params.alpha)
        counts = ladder.extremum_counts()
    except VanishedComponent:
        H, counts = ControlPointSet(), []
    info = {"extremum_counts": counts, "path": "scale-space"}
    found = len(H)

    if len(H) == 0:
        circle, H = _degenerate(curve)
        if circle is not None:
            return VectorOutline("circle", curve=curve, circle=circle, info={**info, "path": "circle"})
        info["path"] = "distant-pair"
    H = delete_flat(curve, H, params.epsilon_flat)
    if len(H) == 0:
        circle, H = _degenerate(curve)
        if circle is not None:
            return VectorOutline("circle", curve=curve, circle=circle, candidates=found,
                                 info={**info, "path": "circle"})
        info["path"] = "distant-pair"
    H = insert_until(curve, H, params.tau_e, params.straight_kappa)
    if params.merge:
        H = merge_segments(curve, H, params.tau_e, params.straight_kappa)
    segs = fit_segments(curve, H.indices, params.straight_kappa)
    return VectorOutline("bezier", curve=curve, polygon=BezierPolygon(segs), controls=H,
                         candidates=found, info=info)


__all__ = [
    "VectorizeParams", "VectorOutline", "tangents_at_controls", "flatness", "delete_flat",
    "insert_until", "merge_segments", "vectorize", "fit_segments", "segment_runs",
    "SCALE_SPACE", "DISTANT_PAIR", "INSERTED",
]
