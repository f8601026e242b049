import os
import re

import numpy as np
import pytest

from silhouvec import synth
from silhouvec.evaluate import dsc
from silhouvec.geometry import CircleShape
from silhouvec.pipeline import vectorize_image
from silhouvec.refine import VectorOutline
from silhouvec.bezier import BezierPolygon, straight_cubic
from silhouvec.svgio import (fill_even_odd, fmt, parse_path, rasterize, rasterize_svg, read_svg,
                             svg_text, write_svg)

from conftest import cached_vectorize, fixture_raster

FIXTURES = ["disk", "square", "stadium", "ellipse", "rounded_star", "knot"]


def _circle(cx, cy, r):
    return VectorOutline("circle", circle=CircleShape((cx, cy), r))


def _square_outline(x0, y0, side):
    p = np.array([[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]], float)
    segs = np.array([straight_cubic(p[k], p[(k + 1) % 4]) for k in range(4)])
    return VectorOutline("bezier", curve=p, polygon=BezierPolygon(segs))


def test_fmt():
    assert fmt(100.0) == "100"
    assert fmt(1.23456) == "1.235"
    assert fmt(-0.0001) == "0"
    assert fmt(2.5, integer=True) == "2"
    assert fmt(3.5, integer=True) == "4"


def test_single_circle_document():
    text = svg_text([_circle(100, 100, 50)], 200, 200)
    circles = re.findall(r"<circle [^>]*>", text)
    assert len(circles) == 1
    assert 'cx="100"' in circles[0] and 'cy="100"' in circles[0] and 'r="50"' in circles[0]
    assert 'viewBox="0 0 200 200"' in text
    assert "<path" not in text


def test_square_uses_line_commands():
    text = svg_text(cached_vectorize("square"), 400, 400)
    d = re.search(r' d="([^"]*)"', text).group(1)
    assert d.count("L") == 4 and "C" not in d
    assert 'fill-rule="evenodd"' in text and 'fill="black"' in text


def test_coordinates_have_at_most_three_decimals():
    text = svg_text(cached_vectorize("rounded_star"), 300, 300)
    nums = re.findall(r"-?\d+\.(\d+)", text.split("<path", 1)[1])
    assert nums and max(len(n) for n in nums) <= 3


@pytest.mark.parametrize("name", FIXTURES)
def test_integer_mode_is_smaller(name, tmp_path):
    r = fixture_raster(name)
    outs = cached_vectorize(name)
    f = write_svg(outs, r.width, r.height, tmp_path / "f.svg")
    i = write_svg(outs, r.width, r.height, tmp_path / "i.svg", integer=True)
    assert i < f
    assert f == os.path.getsize(tmp_path / "f.svg")


def test_circle_raster_area():
    img = rasterize([_circle(100, 100, 50)], 200, 200)
    assert np.count_nonzero(img.samples < 127.5) == pytest.approx(np.pi * 2500, rel=0.01)


def test_square_polygon_pixel_block():
    img = rasterize([_square_outline(50, 50, 100)], 200, 200)
    inside = img.samples < 127.5
    jj, ii = np.mgrid[0:200, 0:200]
    oracle = (ii + 0.5 > 50) & (ii + 0.5 < 150) & (jj + 0.5 > 50) & (jj + 0.5 < 150)
    assert np.array_equal(inside, oracle)


@pytest.mark.parametrize("name", FIXTURES + ["cat"])
def test_round_trip_preserves_raster(name, tmp_path):
    r = fixture_raster(name)
    outs = cached_vectorize(name)
    write_svg(outs, r.width, r.height, tmp_path / "o.svg")
    back = rasterize_svg(tmp_path / "o.svg")
    direct = rasterize(outs, r.width, r.height)
    assert dsc(back, direct) >= 0.999


def test_nested_circles_render_hollow(tmp_path):
    g = np.arange(300) + 0.5
    X, Y = np.meshgrid(g, g)
    d2 = (X - 150) ** 2 + (Y - 150) ** 2
    ring = synth.from_mask((d2 <= 100 ** 2) & (d2 > 40 ** 2))
    outs = vectorize_image(ring)
    assert [o.kind for o in outs] == ["circle", "circle"]
    text = svg_text(outs, 300, 300)
    assert "<circle" not in text and text.count(" A ") == 4
    write_svg(outs, 300, 300, tmp_path / "r.svg")
    back = rasterize_svg(tmp_path / "r.svg")
    assert back.samples[150, 150] == 255 and back.samples[150, 80] == 0
    assert dsc(back, ring) >= 0.99


def test_hole_is_hollow_with_even_odd():
    outer = np.array([[10, 10], [90, 10], [90, 90], [10, 90]], float)
    inner = np.array([[40, 40], [40, 60], [60, 60], [60, 40]], float)
    mask = fill_even_odd([outer, inner], 100, 100)
    assert mask[20, 20] and not mask[50, 50]
    # the same with the hole drawn in the same direction
    assert np.array_equal(mask, fill_even_odd([outer, inner[::-1]], 100, 100))


def test_parser_rejects_bad_data():
    with pytest.raises(ValueError):
        parse_path("M 0 0 Q 1 1 2 2 Z")
    with pytest.raises(ValueError):
        parse_path("L 1 1 Z")
    with pytest.raises(ValueError):
        parse_path("M 0 0 C 1 1 2")


@pytest.mark.parametrize("name", FIXTURES)
def test_written_documents_parse(name, tmp_path):
    r = fixture_raster(name)
    write_svg(cached_vectorize(name), r.width, r.height, tmp_path / "x.svg")
    doc = read_svg(tmp_path / "x.svg")
    assert (doc.width, doc.height) == (r.width, r.height)
    assert len(doc.rings) + len(doc.circles) >= 1


def test_empty_document(tmp_path):
    write_svg([], 10, 20, tmp_path / "e.svg")
    doc = read_svg(tmp_path / "e.svg")
    assert doc.rings == [] and doc.circles == []
    assert np.all(rasterize_svg(tmp_path / "e.svg").samples == 255)


def test_unwritable_target_leaves_nothing(tmp_path):
    target = tmp_path / "missing" / "x.svg"
    with pytest.raises(OSError):
        write_svg([_circle(5, 5, 2)], 10, 10, target)
    blocker = tmp_path / "dir.svg"
    blocker.mkdir()
    with pytest.raises(OSError):
        write_svg([_circle(5, 5, 2)], 10, 10, blocker)
    assert [p.name for p in tmp_path.iterdir()] == ["dir.svg"]
