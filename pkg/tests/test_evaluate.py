import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from silhouvec import synth
from silhouvec.errors import InputError, UndefinedMetricError
from silhouvec.evaluate import (MetricReport, dsc, measure, reduction_curve, repeatability,
                                rotate_raster, rotation_repeatability, scale_raster)
from silhouvec.raster import RasterImage


def _mask(shape, cells):
    m = np.zeros(shape, bool)
    for r, c in cells:
        m[r, c] = True
    return m


def test_dsc_examples():
    a = np.zeros((20, 20), bool)
    a[:10, :10] = True
    assert dsc(a, a) == 1.0
    b = np.zeros((20, 20), bool)
    b[10:, 10:] = True
    assert dsc(a, b) == 0.0
    c = np.zeros((20, 20), bool)
    c[:5, :10] = True
    c[10:15, 10:] = True
    assert dsc(a, c) == pytest.approx(0.5)
    empty = np.zeros((3, 3), bool)
    assert dsc(empty, empty) == 1.0


def test_dsc_on_rasters_and_size_mismatch():
    r = synth.disk()
    assert dsc(r, r) == 1.0
    with pytest.raises(InputError):
        dsc(r, RasterImage(np.zeros((3, 3))))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_dsc_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.random((8, 9)) < 0.4, rng.random((8, 9)) < 0.6
    assert dsc(a, b) == dsc(b, a)
    assert 0.0 <= dsc(a, b) <= 1.0


def test_repeatability_examples(rng):
    p = rng.uniform(0, 100, (30, 2))
    assert repeatability(p, p) == 1.0
    assert repeatability(p, p + [3.0, 0.0], epsilon=1.5) <= 0.2
    grid = np.array([[x, y] for x in range(0, 100, 10) for y in range(0, 100, 10)], float)
    assert repeatability(grid, grid + [3.0, 0.0], epsilon=1.5) == 0.0
    with pytest.raises(UndefinedMetricError):
        repeatability([], [])
    assert repeatability(p, []) == 0.0
    with pytest.raises(ValueError):
        repeatability(p, p, epsilon=0)


def test_repeatability_rotation_matches_brute_force(rng):
    p = rng.uniform(0, 100, (50, 2))
    th = np.deg2rad(30)
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    moved = p @ R.T + rng.uniform(-0.5, 0.5, p.shape)
    got = repeatability(p, moved, lambda q: q @ R, 1.5)
    back = moved @ R
    d = np.hypot(back[:, None, 0] - p[None, :, 0], back[:, None, 1] - p[None, :, 1])
    expect = np.count_nonzero(d.min(axis=1) <= 1.5) / 50
    assert got == pytest.approx(expect)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_repeatability_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 10, (rng.integers(1, 20), 2))
    b = rng.uniform(0, 10, (rng.integers(1, 20), 2))
    assert 0.0 <= repeatability(a, b) <= 1.0


def test_rotation_inverse_maps_features_back():
    img = np.full((101, 121), 255.0)
    img[30, 80] = 0.0
    rot, inv = rotate_raster(RasterImage(img), 90)
    r, c = np.unravel_index(np.argmin(rot.samples), rot.samples.shape)
    back = inv(np.array([[c + 0.5, r + 0.5]]))[0]
    assert np.allclose(back, [80.5, 30.5], atol=1.0)
    assert rot.samples[0, 0] == 255.0


def test_scale_inverse_maps_features_back():
    img = np.full((50, 60), 255.0)
    img[20:22, 40:42] = 0.0
    big, inv = scale_raster(RasterImage(img), 2.0)
    assert (big.width, big.height) == (120, 100)
    ys, xs = np.nonzero(big.samples < 127.5)
    assert np.allclose(inv(np.array([[xs.mean() + 0.5, ys.mean() + 0.5]])), [[41, 21]], atol=0.5)


def test_reduction_curve_baseline_and_sign():
    fx = {"square": synth.square(), "rounded_star": synth.rounded_star()}
    rc = reduction_curve(fx, [1.0, 2.0])
    assert rc.taus == [0.5, 1.0, 2.0]
    assert all(r[0] == 0.0 for r in rc.rho.values())
    for r in rc.rho.values():
        assert all(b <= a for a, b in zip(r, r[1:]))
    with pytest.raises(ValueError):
        reduction_curve(fx, [0.5])


def test_rotation_sweep_shape():
    rows = rotation_repeatability(synth.square(), angles=[90])
    assert rows[0][0] == 90.0 and rows[0][1] == pytest.approx(1.0)


def test_metric_report_json_and_validation():
    rep = measure(synth.disk())
    data = json.loads(rep.to_json())
    assert list(data) == ["dsc", "control_points", "circles", "components", "file_bytes_float",
                          "file_bytes_int", "processing_seconds", "repeatability"]
    assert data["circles"] == 1 and data["control_points"] == 0
    assert data["file_bytes_int"] < data["file_bytes_float"]
    with pytest.raises(ValueError):
        MetricReport(1.5, 0, 0, 0, 0, 0, 0.0)


def test_cat_processing_time():
    rep = measure(synth.cat())
    assert rep.processing_seconds < 2.0
    assert rep.dsc >= 0.93
