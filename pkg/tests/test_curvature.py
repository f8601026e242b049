import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from silhouvec.curvature import (KERNEL, CurvatureProfile, curvature_profile, discrete_curvature,
                                 find_extrema, smooth_profile)
from silhouvec.outline import resample_uniform

from conftest import circle_polyline


def test_collinear_is_zero():
    p = np.array([[0, 0], [1, 0], [2, 0], [1, 5]], float)
    assert discrete_curvature(p).raw[1] == 0.0


def test_duplicate_neighbour_gives_zero():
    p = np.array([[0, 0], [0, 0], [1, 0], [0, 1]], float)
    assert discrete_curvature(p).raw[0] == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 200), st.floats(0.5, 500))
def test_regular_polygon_inverse_radius(n, radius):
    k = discrete_curvature(circle_polyline(radius, n)).raw
    assert np.allclose(k, 1.0 / radius, rtol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 5.0))
def test_orientation_and_scale(lam):
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    p = np.column_stack([3 * np.cos(t), np.sin(t) * (2 + np.cos(3 * t))])
    k = discrete_curvature(p).raw
    assert np.allclose(discrete_curvature(p[::-1]).raw[::-1], -k)
    assert np.allclose(discrete_curvature(lam * p).raw, k / lam)


def test_constant_profile_unchanged():
    prof = smooth_profile(CurvatureProfile(raw=np.full(64, 0.3)))
    assert np.allclose(prof.filtered, 0.3)


def test_impulse_matches_naive_convolution():
    n = 100
    raw = np.zeros(n)
    raw[0] = 1.0
    got = smooth_profile(CurvatureProfile(raw=raw)).filtered
    ref = raw.copy()
    for _ in range(20):
        nxt = np.zeros(n)
        for i in range(n):
            for k, w in zip(range(-2, 3), KERNEL):
                nxt[i] += w * ref[(i + k) % n]
        ref = nxt
    assert np.allclose(got, ref, atol=1e-12)


def test_alternating_profile_decay():
    raw = np.tile([1.0, -1.0], 50)
    got = smooth_profile(CurvatureProfile(raw=raw)).filtered
    assert np.allclose(got, raw * (2.0 / 18.0) ** 20, rtol=1e-9, atol=0)


def test_constant_has_no_extrema_and_threshold():
    flat = smooth_profile(CurvatureProfile(raw=np.full(40, 0.01)))
    assert find_extrema(flat) == []
    bump = CurvatureProfile(raw=None, filtered=np.zeros(40))
    bump.filtered[10] = 0.0005
    assert find_extrema(bump, 0.001) == []
    bump.filtered[10] = 0.002
    assert find_extrema(bump, 0.001) == [10]


def test_find_extrema_requires_smoothing():
    with pytest.raises(ValueError):
        find_extrema(CurvatureProfile(raw=np.zeros(5)))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=60))
def test_extrema_match_brute_force(values):
    f = np.array(values)
    prof = CurvatureProfile(raw=f, filtered=f)
    n = len(f)
    expect = [i for i in range(n)
              if abs(f[i]) > 0.001 and all(abs(f[i]) > abs(f[(i + d) % n]) for d in (-2, -1, 1, 2))]
    assert find_extrema(prof, 0.001) == expect


def _rounded_square(side, radius, step=0.25):
    h = side / 2 - radius
    pts = []
    for k, (cx, cy) in enumerate([(h, h), (-h, h), (-h, -h), (h, -h)]):
        t = np.linspace(k * np.pi / 2, (k + 1) * np.pi / 2, 200)
        pts.append(np.column_stack([cx + radius * np.cos(t), cy + radius * np.sin(t)]))
    return resample_uniform(np.vstack(pts), step)


def test_rounded_square_has_four_corner_extrema():
    p = _rounded_square(100, 2.0)
    prof = curvature_profile(p)
    assert len(prof.extrema) == 4
    corners = np.array([[48, 48], [-48, 48], [-48, -48], [48, -48]])
    for i in prof.extrema:
        assert np.min(np.hypot(*(corners - p[i]).T)) < 3.0
