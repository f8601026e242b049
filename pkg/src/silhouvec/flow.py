"""Affine shortening by iterated discrete affine erosion.

A closed polyline is cut at its inflection points into convex arcs. Each
arc is replaced by the polygon through the midpoints of its sigma-chords
(chords cutting off area exactly ``sigma``); arcs too flat to hold one
sigma-chord collapse onto the chord joining their ends. Inflection points
stay fixed during a pass. After gluing, the curve is resampled and the
next pass begins.

One pass of area ``sigma`` moves a smooth convex curve like the flow
``dC/dt = k^(1/3) N`` run for time ``OMEGA * sigma**(2/3)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .outline import DEFAULT_STEP, drop_repeats, resample_uniform, signed_area
from .errors import DegenerateInputError

OMEGA = 0.5 * 1.5 ** (2.0 / 3.0)
DEFAULT_SIGMA_STEP = 0.05
MIN_AREA = 1.0
_TURN_TOL = 1e-10


@dataclass(frozen=True)
class ErosionParams:
    sigma_step: float = DEFAULT_SIGMA_STEP
    target_scale: float = 0.0
    omega: float = OMEGA

    def __post_init__(self):
        if self.sigma_step <= 0 or self.target_scale < 0 or self.omega <= 0:
            raise ValueError("invalid erosion parameters")


def scale_time(scale: float, omega: float = OMEGA) -> float:
    """Flow time equivalent to one erosion of area ``scale``."""
    return omega * float(scale) ** (2.0 / 3.0)


def scale_to_time(sigmas, omega: float = OMEGA) -> float:
    """Flow time reached after erosion passes with the given areas."""
    return float(omega * np.sum(np.asarray(sigmas, dtype=np.float64) ** (2.0 / 3.0)))


def turning_signs(points: np.ndarray) -> np.ndarray:
    """Sign of the discrete turn at every vertex (0 where numerically straight)."""
    p = np.asarray(points, dtype=np.float64)
    e_in = p - np.roll(p, 1, axis=0)
    e_out = np.roll(p, -1, axis=0) - p
    cross = e_in[:, 0] * e_out[:, 1] - e_in[:, 1] * e_out[:, 0]
    scale = np.hypot(*e_in.T) * np.hypot(*e_out.T)
    sign = np.sign(cross).astype(np.int8)
    sign[np.abs(cross) <= _TURN_TOL * scale] = 0
    return sign


@dataclass(frozen=True)
class ConvexArc:
    """Run of a closed curve between two consecutive inflection points.

    ``start``/``stop`` are fractional vertex positions of the bounding
    inflections (``stop`` may exceed ``n`` when the run wraps past vertex 0).
    ``points`` holds both inflection points and every vertex between them.
    A curve without inflections is one arc with ``stop - start == n`` whose
    ``points`` are just the curve's vertices.
    """

    points: np.ndarray
    sign: int
    start: float
    stop: float

    @property
    def closed(self) -> bool:
        return self.stop - self.start >= len(self.points) and self.start == 0.0


def _point_at(p: np.ndarray, pos: float) -> np.ndarray:
    n = len(p)
    i = int(np.floor(pos))
    f = pos - i
    a = p[i % n]
    if f == 0:
        return a.copy()
    return a + f * (p[(i + 1) % n] - a)


def split_convex(points: np.ndarray) -> list[ConvexArc]:
    """Partition a closed polyline at the sign changes of its turning angle.

    Between turning vertices ``a`` and ``b`` of opposite sign (straight
    vertices in between are ignored) the inflection sits at fractional
    position ``(a + b) / 2``, an edge midpoint or a vertex.
    """
    p = np.asarray(points, dtype=np.float64)
    n = len(p)
    signs = turning_signs(p)
    nz = np.flatnonzero(signs)
    if len(nz) == 0 or np.all(signs[nz] == signs[nz[0]]):
        s = int(signs[nz[0]]) if len(nz) else 0
        return [ConvexArc(points=p.copy(), sign=s, start=0.0, stop=float(n))]
    nxt = np.roll(nz, -1)
    gap = (nxt - nz) % n
    change = signs[nz] != signs[nxt]
    cuts = np.sort((nz[change] + gap[change] / 2.0) % n)
    arcs = []
    for k in range(len(cuts)):
        a = float(cuts[k])
        b = float(cuts[(k + 1) % len(cuts)])
        if b <= a:
            b += n
        idx = np.arange(int(np.floor(a)) + 1, int(np.ceil(b))) % n
        pts = np.vstack([_point_at(p, a), p[idx], _point_at(p, b)])
        turning = signs[idx][signs[idx] != 0]
        s = int(turning[0]) if len(turning) else 0
        arcs.append(ConvexArc(points=pts, sign=s, start=a, stop=b))
    return arcs


def _chords(q, sgn, seam, starts, ends, sigma):
    """Sigma-chords starting at vertices ``starts`` of the concatenated runs ``q``.

    ``ends[k]`` is the last vertex the chord from ``starts[k]`` may reach;
    ``seam[i]`` marks a break between vertex ``i`` and ``i + 1``. Only starts
    whose capacity exceeds ``sigma`` are kept. Returns kept starts, the end
    segment index and parameter, and the chord midpoints.
    """
    cr = q[:-1, 0] * q[1:, 1] - q[:-1, 1] * q[1:, 0]
    cr[seam] = 0.0
    s_cum = np.concatenate([[0.0], np.cumsum(cr)])

    def area(i, j):
        return 0.5 * sgn[i] * (s_cum[j] - s_cum[i] + q[j, 0] * q[i, 1] - q[j, 1] * q[i, 0])

    keep = area(starts, ends) > sigma
    a = starts[keep]
    hi = ends[keep].copy()
    lo = a + 1
    while True:
        gap = hi - lo > 1
        if not gap.any():
            break
        mid = (lo + hi) // 2
        ok = area(a, mid) <= sigma
        lo = np.where(gap & ok, mid, lo)
        hi = np.where(gap & ~ok, mid, hi)
    b = lo
    qa, qb = q[a], q[b]
    d = q[b + 1] - qb
    w = qa - qb
    slope = 0.5 * sgn[a] * (d[:, 0] * w[:, 1] - d[:, 1] * w[:, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(slope > 0, (sigma - area(a, b)) / slope, 0.0)
    u = np.clip(u, 0.0, 1.0)
    return a, b, u, 0.5 * (qa + qb + u[:, None] * d)


def _vertex_chords(q, sgn, centers, kmax, sigma):
    """Sigma-chords symmetric about vertices: from position c - t to c + t.

    ``kmax[k]`` bounds the half-span in vertices. The cut-off area is
    quadratic in the fractional part of ``t``, so after an integer bisection
    the last step is solved exactly. Returns kept centres and midpoints.
    """
    cr = q[:-1, 0] * q[1:, 1] - q[:-1, 1] * q[1:, 0]
    s_cum = np.concatenate([[0.0], np.cumsum(cr)])

    def area2(i, j):
        return sgn[i] * (s_cum[j] - s_cum[i] + q[j, 0] * q[i, 1] - q[j, 1] * q[i, 0])

    c = np.asarray(centers)
    km = np.asarray(kmax)
    keep = (km >= 1) & (area2(c - km, c + km) > 2 * sigma)
    c, km = c[keep], km[keep]
    lo = np.zeros_like(c)
    hi = km.copy()
    while True:
        gap = hi - lo > 1
        if not gap.any():
            break
        mid = (lo + hi) // 2
        ok = area2(c - mid, c + mid) <= 2 * sigma
        lo = np.where(gap & ok, mid, lo)
        hi = np.where(gap & ~ok, mid, hi)
    a0, b0 = q[c - lo], q[c + lo]
    dl, dr = q[c - lo - 1] - a0, q[c + lo + 1] - b0

    def cross(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    s = sgn[c]
    c0 = area2(c - lo, c + lo) - 2 * sigma
    c1 = s * (cross(dl, a0) + cross(b0, dr) + cross(dr, a0) + cross(b0, dl))
    c2 = s * cross(dr, dl)
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = np.sqrt(np.maximum(c1 * c1 - 4 * c2 * c0, 0.0))
        # numerically stable root of c2 f^2 + c1 f + c0 = 0 with c0 <= 0 < c1
        f = np.where(c1 + disc > 0, -2 * c0 / (c1 + disc), 0.0)
    f = np.clip(np.nan_to_num(f), 0.0, 1.0)
    mids = 0.5 * (a0 + f[:, None] * dl + b0 + f[:, None] * dr)
    return c, mids


def affine_erode(arc: np.ndarray, sigma: float, sign: int | None = None,
                 closed: bool = False) -> tuple[np.ndarray, bool]:
    """Sigma-affine erosion of one convex run.

    For an open arc the end points are kept and the chord midpoints fill
    the interior; ``collapsed`` is True when no sigma-chord fits, in which
    case only the end points remain. A closed convex curve holding less
    than ``2 * sigma`` of area collapses to its centroid.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    q = np.asarray(arc, dtype=np.float64)
    if sign is None:
        sign = 1 if signed_area(q) >= 0 else -1
    if closed:
        out = _erode_closed(q, sigma, sign)
        if out is None:
            return q.mean(axis=0, keepdims=True), True
        return out, False
    mids = _erode_runs([q], [sign], sigma)[0]
    return np.vstack([q[:1], mids, q[-1:]]), len(mids) == 0


def _erode_closed(p, sigma, sign):
    n = len(p)
    if abs(signed_area(p)) <= 2 * sigma:
        return None
    origin = p.mean(axis=0)
    params, mids = [], []
    for reverse in (False, True):
        base = (p[::-1] if reverse else p) - origin
        q = base[np.arange(2 * n + 1) % n]
        sgn = np.full(len(q), -sign if reverse else sign, dtype=np.float64)
        seam = np.zeros(len(q) - 1, dtype=bool)
        starts = np.arange(n)
        a, b, u, m = _chords(q, sgn, seam, starts, starts + n, sigma)
        if reverse:
            params.append((n - 1 - 0.5 * (a + b + u)) % n)
        else:
            params.append((0.5 * (a + b + u)) % n)
        mids.append(m)
    q = p[np.arange(3 * n) % n] - origin
    c, m = _vertex_chords(q, np.full(3 * n, float(sign)), np.arange(n) + n,
                          np.full(n, n // 2), sigma)
    params.append((c - n).astype(np.float64))
    mids.append(m)
    order = np.argsort(np.concatenate(params), kind="stable")
    return drop_repeats(np.vstack(mids)[order] + origin)


def _erode_runs(runs, signs, sigma):
    """Erode several open runs in one vectorised sweep; returns midpoints per run."""
    sizes = np.array([len(r) for r in runs])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    run_id = np.repeat(np.arange(len(runs)), sizes)
    allp = np.vstack(runs)
    origin = allp.mean(axis=0)
    q_fwd = allp - origin
    sgn_fwd = np.repeat(np.array([s if s != 0 else 1 for s in signs], dtype=np.float64), sizes)
    seam_fwd = run_id[:-1] != run_id[1:]
    last_fwd = (offsets[1:] - 1)[run_id]
    params, mids = [], []
    for reverse in (False, True):
        if reverse:
            q = q_fwd[::-1]
            sgn = -sgn_fwd[::-1]
            seam = seam_fwd[::-1]
            ends = (total - 1 - offsets[:-1])[run_id[::-1]]
        else:
            q, sgn, seam, ends = q_fwd, sgn_fwd, seam_fwd, last_fwd
        starts = np.arange(total)
        a, b, u, m = _chords(np.ascontiguousarray(q), sgn, seam.copy(), starts, ends, sigma)
        if reverse:
            params.append(total - 1 - 0.5 * (a + b + u))
        else:
            params.append(0.5 * (a + b + u))
        mids.append(m)
    idx = np.arange(total)
    span = np.minimum(idx - offsets[:-1][run_id], (offsets[1:] - 1)[run_id] - idx)
    c, m = _vertex_chords(q_fwd, sgn_fwd, idx, span, sigma)
    params.append(c.astype(np.float64))
    mids.append(m)
    param = np.concatenate(params)
    pts = np.vstack(mids) + origin
    order = np.argsort(param, kind="stable")
    param, pts = param[order], pts[order]
    owner = np.clip(np.searchsorted(offsets, np.floor(param), side="right") - 1, 0, len(runs) - 1)
    bounds = np.searchsorted(owner, np.arange(len(runs) + 1), side="left")
    return [pts[bounds[k]:bounds[k + 1]] for k in range(len(runs))]


def erosion_pass(points: np.ndarray, sigma: float) -> np.ndarray | None:
    """One sigma-affine erosion of a closed polyline (no resampling).

    Returns None when the curve collapses.
    """
    p = np.asarray(points, dtype=np.float64)
    arcs = split_convex(p)
    if len(arcs) == 1:
        sign = arcs[0].sign or (1 if signed_area(p) >= 0 else -1)
        return _erode_closed(p, sigma, sign)
    mids = _erode_runs([a.points for a in arcs], [a.sign for a in arcs], sigma)
    pieces = []
    for arc, m in zip(arcs, mids):
        pieces.append(arc.points[:1])
        pieces.append(m)
    return drop_repeats(np.vstack(pieces))


def passes_for_time(time: float, max_sigma: float = DEFAULT_SIGMA_STEP,
                    omega: float = OMEGA) -> list[float]:
    """Equal erosion areas, each at most ``max_sigma``, adding up to flow ``time``."""
    if time <= 0:
        return []
    n = max(1, math.ceil(time / (omega * max_sigma ** (2.0 / 3.0)) - 1e-12))
    return [(time / (n * omega)) ** 1.5] * n


def evolve(curve: np.ndarray, time: float, max_sigma: float = DEFAULT_SIGMA_STEP,
           step: float = DEFAULT_STEP) -> np.ndarray | None:
    """Run the erosion scheme for flow ``time`` with passes of at most ``max_sigma``.

    Every pass is followed by uniform resampling at ``step``. Returns None
    if the curve vanishes (area below one square pixel).
    """
    p = np.asarray(curve, dtype=np.float64)
    for sigma in passes_for_time(time, max_sigma):
        p = erosion_pass(p, sigma)
        if p is None or len(p) < 3 or abs(signed_area(p)) < MIN_AREA:
            return None
        try:
            p = resample_uniform(p, step)
        except DegenerateInputError:
            return None
    return p


def shorten(curve: np.ndarray, target_scale: float, max_sigma: float = DEFAULT_SIGMA_STEP,
            step: float = DEFAULT_STEP) -> np.ndarray | None:
    """Evolve a closed polyline to erosion scale ``target_scale``.

    Scale ``s`` is the flow time reached by a single ``s``-erosion,
    ``OMEGA * s**(2/3)``; it is covered by several smaller passes.
    """
    if target_scale < 0:
        raise ValueError("target_scale must be non-negative")
    return evolve(curve, scale_time(target_scale), max_sigma, step)
