"""Image-level driver: extract every component and vectorize each one."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import DegenerateInputError
from .outline import extract_level_lines, resample_uniform
from .raster import BilinearField, RasterImage
from .refine import VectorizeParams, VectorOutline, vectorize

JOBS_ENV = "SILHOUVEC_JOBS"


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"{JOBS_ENV} must be at least 1")
        return n
    return os.cpu_count() or 1


def extract_outlines(raster: RasterImage, params: VectorizeParams = VectorizeParams()) -> list[np.ndarray]:
    """Resampled level-line components, topmost-leftmost first.

    Components shorter than three sampling steps carry no shape and are
    dropped.
    """
    out = []
    for c in extract_level_lines(BilinearField(raster), params.level):
        try:
            out.append(resample_uniform(c, params.step))
        except DegenerateInputError:
            continue
    return out


def _work(args):
    curve, params = args
    return vectorize(curve, params)


def vectorize_outlines(curves: list[np.ndarray], params: VectorizeParams = VectorizeParams(),
                       jobs: int = 1) -> list[VectorOutline]:
    """Vectorize components, in a process pool when ``jobs > 1``; order is preserved."""
    if jobs <= 1 or len(curves) <= 1:
        return [vectorize(c, params) for c in curves]
    with ProcessPoolExecutor(max_workers=min(jobs, len(curves))) as ex:
        return list(ex.map(_work, [(c, params) for c in curves]))


def vectorize_image(raster: RasterImage, params: VectorizeParams = VectorizeParams(),
                    jobs: int = 1) -> list[VectorOutline]:
    return vectorize_outlines(extract_outlines(raster, params), params, jobs)
