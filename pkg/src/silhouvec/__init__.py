"""Raster silhouette vectorization into cubic Bezier outlines and circles."""
from .errors import DegenerateInputError, InputError, UndefinedMetricError
from .geometry import CircleShape
from .pipeline import extract_outlines, vectorize_image
from .raster import RasterImage, load_image
from .refine import VectorizeParams, VectorOutline, vectorize
from .svgio import rasterize, write_svg

__version__ = "0.1.0"

__all__ = [
    "CircleShape", "DegenerateInputError", "InputError", "RasterImage", "UndefinedMetricError",
    "VectorOutline", "VectorizeParams", "extract_outlines", "load_image", "rasterize",
    "vectorize", "vectorize_image", "write_svg",
]
