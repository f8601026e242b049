import functools

import numpy as np
import pytest
from scipy.spatial import cKDTree

from silhouvec import synth
from silhouvec.bezier import eval_cubic
from silhouvec.pipeline import extract_outlines, vectorize_image
from silhouvec.refine import VectorizeParams


@functools.lru_cache(maxsize=None)
def fixture_raster(name):
    if name == "cat":
        return synth.cat()
    if name == "disk100":
        return synth.disk(radius=100, size=(300, 300))
    return synth.suite()[name]


@functools.lru_cache(maxsize=None)
def cached_outlines(name):
    return extract_outlines(fixture_raster(name))


@functools.lru_cache(maxsize=None)
def cached_vectorize(name, **kw):
    return vectorize_image(fixture_raster(name), VectorizeParams(**kw))


def dense_deviation(points, segments, spacing=0.002):
    """Oracle: max over points of the distance to a dense sampling of every cubic.

    Nearest-sample distance overestimates the true distance by at most
    ``spacing / 2``.
    """
    samples = []
    for c in segments:
        hull = float(np.sum(np.hypot(*np.diff(c, axis=0).T)))
        n = max(16, int(np.ceil(hull / spacing)))
        samples.append(eval_cubic(c, np.linspace(0.0, 1.0, n + 1)))
    d, _ = cKDTree(np.vstack(samples)).query(np.asarray(points))
    return float(d.max())


def circle_polyline(r, n, cx=0.0, cy=0.0):
    t = 2 * np.pi * np.arange(n) / n
    return np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
