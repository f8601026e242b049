"""Quality metrics: Dice similarity, feature repeatability and control-point reduction."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import InputError, UndefinedMetricError
from .pipeline import vectorize_image
from .raster import RasterImage
from .refine import VectorizeParams, VectorOutline
from .svgio import rasterize, svg_text

INSIDE_LEVEL = 127.5
REPEAT_EPSILON = 1.5
BASELINE_TAU = 0.5
ROTATIONS = tuple(range(10, 360, 10))
SCALES = tuple(round(0.5 + 0.1 * k, 1) for k in range(16))


def _inside(r) -> np.ndarray:
    if isinstance(r, RasterImage):
        return r.samples < INSIDE_LEVEL
    a = np.asarray(r)
    return a if a.dtype == bool else a < INSIDE_LEVEL


def dsc(a, b) -> float:
    """Dice coefficient of the interior pixel sets; 1 when both are empty."""
    A, B = _inside(a), _inside(b)
    if A.shape != B.shape:
        raise InputError(f"raster sizes differ: {A.shape[::-1]} vs {B.shape[::-1]}")
    na, nb = int(A.sum()), int(B.sum())
    if na + nb == 0:
        return 1.0
    return 2.0 * int(np.count_nonzero(A & B)) / (na + nb)


def repeatability(points0, points_t, inverse: Callable[[np.ndarray], np.ndarray] | None = None,
                  epsilon: float = REPEAT_EPSILON) -> float:
    """Share of transformed points that map back within ``epsilon`` of an original point.

    ``inverse`` takes an ``(N, 2)`` array to the original frame (identity
    when None). The count is divided by the smaller of the two set sizes.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    p0 = np.asarray(points0, dtype=np.float64).reshape(-1, 2)
    pt = np.asarray(points_t, dtype=np.float64).reshape(-1, 2)
    if len(p0) == 0 and len(pt) == 0:
        raise UndefinedMetricError("both feature sets are empty")
    if len(p0) == 0 or len(pt) == 0:
        return 0.0
    back = inverse(pt) if inverse is not None else pt
    d, _ = cKDTree(p0).query(back)
    n_repeat = int(np.count_nonzero(d <= epsilon))
    return min(1.0, n_repeat / min(len(p0), len(pt)))


def feature_points(outlines: list[VectorOutline]) -> np.ndarray:
    pts = [o.feature_points() for o in outlines if o.kind != "empty"]
    return np.vstack(pts) if pts else np.zeros((0, 2))


def control_count(outlines: list[VectorOutline]) -> int:
    return sum(o.control_count for o in outlines)


# ---------------------------------------------------------------- transforms

def rotate_raster(raster: RasterImage, angle_deg: float) -> tuple[RasterImage, Callable]:
    """Rotate about the image centre (bilinear, white fill, same size).

    Returns the rotated raster and the map taking its coordinates back to
    the source frame. Positive angles turn clockwise on screen (y down).
    """
    h, w = raster.height, raster.width
    th = math.radians(angle_deg)
    c, s = math.cos(th), math.sin(th)
    # index frame (row, col); centre of the image in index units
    cr, cc = h / 2.0 - 0.5, w / 2.0 - 0.5
    # source (row, col) = R^T (dest - centre) + centre, with (x, y) -> (col, row)
    m = np.array([[c, -s], [s, c]])
    offset = np.array([cr, cc]) - m @ np.array([cr, cc])
    out = ndimage.affine_transform(raster.samples, m, offset=offset, order=1,
                                   mode="constant", cval=255.0)
    cx, cy = w / 2.0, h / 2.0

    def inverse(p):
        p = np.asarray(p, dtype=np.float64).reshape(-1, 2)
        dx, dy = p[:, 0] - cx, p[:, 1] - cy
        return np.column_stack([cx + c * dx + s * dy, cy - s * dx + c * dy])

    return RasterImage(np.clip(out, 0.0, 255.0)), inverse


def scale_raster(raster: RasterImage, factor: float) -> tuple[RasterImage, Callable]:
    """Resize by ``factor`` about the origin corner (bilinear, white fill)."""
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    h = max(1, int(round(raster.height * factor)))
    w = max(1, int(round(raster.width * factor)))
    rows = (np.arange(h) + 0.5) / factor - 0.5
    cols = (np.arange(w) + 0.5) / factor - 0.5
    R, C = np.meshgrid(rows, cols, indexing="ij")
    out = ndimage.map_coordinates(raster.samples, [R, C], order=1, mode="constant", cval=255.0)

    def inverse(p):
        return np.asarray(p, dtype=np.float64).reshape(-1, 2) / factor

    return RasterImage(np.clip(out, 0.0, 255.0)), inverse


def rotation_repeatability(raster: RasterImage, angles=ROTATIONS,
                           params: VectorizeParams = VectorizeParams(),
                           epsilon: float = REPEAT_EPSILON, jobs: int = 1) -> list[tuple[float, float]]:
    base = feature_points(vectorize_image(raster, params, jobs))
    out = []
    for a in angles:
        rr, inv = rotate_raster(raster, a)
        pts = feature_points(vectorize_image(rr, params, jobs))
        out.append((float(a), repeatability(base, pts, inv, epsilon)))
    return out


def scale_repeatability(raster: RasterImage, factors=SCALES,
                        params: VectorizeParams = VectorizeParams(),
                        epsilon: float = REPEAT_EPSILON, jobs: int = 1) -> list[tuple[float, float]]:
    base = feature_points(vectorize_image(raster, params, jobs))
    out = []
    for f in factors:
        rr, inv = scale_raster(raster, f)
        pts = feature_points(vectorize_image(rr, params, jobs))
        out.append((float(f), repeatability(base, pts, inv, epsilon)))
    return out


# ---------------------------------------------------------------- reduction curve

@dataclass
class ReductionCurve:
    taus: list[float]
    counts: dict[str, list[int]]
    rho: dict[str, list[float]]
    mean: list[float]
    std: list[float]


def reduction_curve(fixtures: dict[str, RasterImage], taus,
                    params: VectorizeParams = VectorizeParams(), jobs: int = 1) -> ReductionCurve:
    """Percentage change in control points relative to ``tau_e = 0.5``.

    Fixtures that end up with no control points at the baseline (a lone
    circle) contribute zero change.
    """
    taus = [float(t) for t in taus]
    if any(t <= BASELINE_TAU for t in taus):
        raise ValueError("tau values must exceed the 0.5 baseline")
    grid = [BASELINE_TAU] + taus
    counts, rho = {}, {}
    for name, r in fixtures.items():
        c = [control_count(vectorize_image(r, _with(params, tau_e=t), jobs)) for t in grid]
        counts[name] = c
        rho[name] = [0.0 if c[0] == 0 else 100.0 * (n - c[0]) / c[0] for n in c]
    table = np.array([rho[k] for k in fixtures]) if fixtures else np.zeros((0, len(grid)))
    mean = table.mean(axis=0).tolist() if len(table) else [0.0] * len(grid)
    std = table.std(axis=0).tolist() if len(table) else [0.0] * len(grid)
    return ReductionCurve(grid, counts, rho, mean, std)


def _with(params: VectorizeParams, **kw) -> VectorizeParams:
    d = asdict(params)
    d.update(kw)
    return VectorizeParams(**d)


# ---------------------------------------------------------------- report

@dataclass
class MetricReport:
    dsc: float
    control_points: int
    circles: int
    components: int
    file_bytes_float: int
    file_bytes_int: int
    processing_seconds: float
    repeatability: list | None = None

    def __post_init__(self):
        if not 0.0 <= self.dsc <= 1.0:
            raise ValueError("dsc out of range")
        if self.control_points < 0:
            raise ValueError("negative control count")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def measure(raster: RasterImage, params: VectorizeParams = VectorizeParams(), jobs: int = 1,
            repeat_angles=None, epsilon: float = REPEAT_EPSILON) -> MetricReport:
    """Vectorize once, time it (no file I/O), and collect the report."""
    t0 = time.perf_counter()
    outlines = vectorize_image(raster, params, jobs)
    elapsed = time.perf_counter() - t0
    w, h = raster.width, raster.height
    rep = None
    if repeat_angles:
        rep = [list(x) for x in rotation_repeatability(raster, repeat_angles, params, epsilon, jobs)]
    return MetricReport(
        dsc=dsc(raster, rasterize(outlines, w, h)),
        control_points=control_count(outlines),
        circles=sum(o.kind == "circle" for o in outlines),
        components=len(outlines),
        file_bytes_float=len(svg_text(outlines, w, h).encode()),
        file_bytes_int=len(svg_text(outlines, w, h, integer=True).encode()),
        processing_seconds=elapsed,
        repeatability=rep,
    )
