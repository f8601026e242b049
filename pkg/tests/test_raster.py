import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from silhouvec.errors import InputError
from silhouvec.raster import BilinearField, RasterImage, bilinear_at, load_image, save_image


def test_load_black_2x2(tmp_path):
    p = tmp_path / "b.png"
    Image.fromarray(np.zeros((2, 2), np.uint8)).save(p)
    r = load_image(p)
    assert (r.width, r.height) == (2, 2)
    assert np.array_equal(r.samples, np.zeros((2, 2)))


def test_load_white_1x1(tmp_path):
    p = tmp_path / "w.png"
    Image.fromarray(np.full((1, 1), 255, np.uint8)).save(p)
    assert load_image(p).samples.tolist() == [[255.0]]


def test_truncated_file_is_input_error(tmp_path):
    p = tmp_path / "t.png"
    Image.fromarray(np.zeros((40, 40), np.uint8)).save(p)
    p.write_bytes(p.read_bytes()[:30])
    with pytest.raises(InputError, match="t.png"):
        load_image(p)


def test_missing_and_garbage(tmp_path):
    with pytest.raises(InputError, match="does not exist"):
        load_image(tmp_path / "none.png")
    g = tmp_path / "g.png"
    g.write_text("not an image")
    with pytest.raises(InputError):
        load_image(g)


def test_transparent_composited_over_white(tmp_path):
    arr = np.zeros((3, 3, 4), np.uint8)
    arr[1, 1] = (0, 0, 0, 255)
    p = tmp_path / "a.png"
    Image.fromarray(arr, "RGBA").save(p)
    s = load_image(p).samples
    assert s[1, 1] == 0 and s[0, 0] == 255


def test_colour_uses_rec601_luma(tmp_path):
    arr = np.zeros((1, 3, 3), np.uint8)
    arr[0, 0] = (255, 0, 0)
    arr[0, 1] = (0, 255, 0)
    arr[0, 2] = (0, 0, 255)
    p = tmp_path / "c.png"
    Image.fromarray(arr, "RGB").save(p)
    s = load_image(p).samples[0]
    assert np.allclose(s, [0.299 * 255, 0.587 * 255, 0.114 * 255], atol=1.0)


def test_sixteen_bit_is_rescaled(tmp_path):
    arr = np.array([[0, 65535]], dtype=np.uint16)
    p = tmp_path / "d.png"
    Image.fromarray(arr).save(p)
    assert np.allclose(load_image(p).samples, [[0, 255]])


def test_save_roundtrip(tmp_path):
    r = RasterImage(np.array([[0, 128], [255, 7]], float))
    save_image(r, tmp_path / "x.png")
    assert np.array_equal(load_image(tmp_path / "x.png").samples, r.samples)


def test_raster_validation():
    with pytest.raises(InputError):
        RasterImage(np.zeros((0, 3)))
    with pytest.raises(InputError):
        RasterImage(np.full((2, 2), 300.0))
    with pytest.raises(InputError):
        RasterImage(np.array([[np.nan]]))
    r = RasterImage(np.zeros((2, 3)))
    assert not r.samples.flags.writeable
    assert np.array_equal(r.inverted().samples, np.full((2, 3), 255.0))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(0, 255)))
def test_exact_at_pixel_centres(img):
    f = BilinearField(RasterImage(img))
    h, w = img.shape
    jj, ii = np.mgrid[0:h, 0:w]
    assert np.allclose(f(ii + 0.5, jj + 0.5), img, atol=1e-9)


def test_midpoints_and_cell_centre():
    f = BilinearField(RasterImage(np.array([[0.0, 255.0]])))
    assert bilinear_at(f, 1.0, 0.5) == pytest.approx(127.5)
    g = BilinearField(RasterImage(np.array([[0.0, 0.0], [255.0, 255.0]])))
    assert g(1.0, 1.0) == pytest.approx(127.5)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(0, 255)), st.floats(0.5, 3.5),
       st.floats(0.5, 3.5))
def test_continuity_and_axis_monotone(img, x, y):
    f = BilinearField(RasterImage(img))
    # continuity across the vertical edge through the nearest column of centres
    xe = np.floor(x - 0.5) + 0.5
    assert f(xe - 1e-12, y) == pytest.approx(f(xe + 1e-12, y), abs=1e-6)
    # linear restriction along a horizontal line inside one cell
    c0 = np.floor(x - 0.5) + 0.5
    if c0 + 1 <= 3.5:
        xs = np.linspace(c0, c0 + 1, 11)
        v = f(xs, np.full_like(xs, y))
        d = np.diff(v)
        assert np.all(d >= -1e-9) or np.all(d <= 1e-9)


def test_clamped_outside():
    f = BilinearField(RasterImage(np.array([[10.0, 20.0], [30.0, 40.0]])))
    assert f(-5.0, -5.0) == 10.0
    assert f(9.0, 9.0) == 40.0
