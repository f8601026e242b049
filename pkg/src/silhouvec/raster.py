"""Raster loading and the bilinear interpolation field.

Pixel ``(i, j)`` (column ``i``, row ``j``) is anchored at the continuous
coordinate ``(i + 1/2, j + 1/2)``. Between four neighbouring pixel centres
the field is the bilinear patch ``a*x*y + b*x + c*y + d``; outside the
lattice of pixel centres it is clamped to the nearest pixel value.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InputError


@dataclass(frozen=True)
class RasterImage:
    """Gray-scale raster; ``samples[j, i]`` is the value of pixel (i, j)."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise InputError(f"raster must be a non-empty 2D grid, got shape {s.shape}")
        if not np.all(np.isfinite(s)) or s.min() < 0 or s.max() > 255:
            raise InputError("raster samples must lie in [0, 255]")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def inverted(self) -> "RasterImage":
        return RasterImage(255.0 - self.samples)


def load_image(path) -> RasterImage:
    """Decode a PNG/PGM (or anything Pillow reads) into a gray-scale raster.

    Colour images are reduced to luma with the Rec.601 weights; transparent
    pixels are composited over white first.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise InputError(f"{path}: file does not exist")
    try:
        with Image.open(path) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise InputError(f"{path}: zero-dimension image")
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(im, dtype=np.float64)
                top = 65535.0 if arr.max() > 255 else 255.0
                return RasterImage(np.clip(arr * (255.0 / top), 0, 255))
            if im.mode == "F":
                return RasterImage(np.clip(np.asarray(im, dtype=np.float64), 0, 255))
            if im.mode in ("RGBA", "LA", "PA") or (im.mode == "P" and "transparency" in im.info):
                rgba = im.convert("RGBA")
                white = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                im = Image.alpha_composite(white, rgba)
            gray = im.convert("L")  # ITU-R 601-2 luma
            return RasterImage(np.asarray(gray, dtype=np.float64))
    except InputError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise InputError(f"{path}: cannot decode image ({exc})") from exc


def save_image(raster: RasterImage, path) -> None:
    arr = np.clip(np.rint(raster.samples), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(os.fspath(path))


@dataclass(frozen=True)
class BilinearField:
    """Continuous image obtained by bilinear interpolation of a raster."""

    source: RasterImage

    def __call__(self, x, y):
        return bilinear_at(self, x, y)


def bilinear_at(field: BilinearField, x, y):
    """Evaluate the bilinear field at continuous coordinates (vectorised)."""
    img = field.source.samples
    h, w = img.shape
    gx = np.clip(np.asarray(x, dtype=np.float64) - 0.5, 0.0, w - 1)
    gy = np.clip(np.asarray(y, dtype=np.float64) - 0.5, 0.0, h - 1)
    i0 = np.minimum(np.floor(gx).astype(np.intp), max(w - 2, 0))
    j0 = np.minimum(np.floor(gy).astype(np.intp), max(h - 2, 0))
    i1 = np.minimum(i0 + 1, w - 1)
    j1 = np.minimum(j0 + 1, h - 1)
    fx = gx - i0
    fy = gy - j0
    v00 = img[j0, i0]
    v10 = img[j0, i1]
    v01 = img[j1, i0]
    v11 = img[j1, i1]
    val = v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) + v01 * (1 - fx) * fy + v11 * fx * fy
    if np.ndim(val) == 0:
        return float(val)
    return val
