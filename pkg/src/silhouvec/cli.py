"""Command-line interface: ``silhouvec vectorize|eval-dsc|eval-repeat|stats``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from .errors import InputError, UndefinedMetricError
from .evaluate import (REPEAT_EPSILON, ROTATIONS, SCALES, control_count, dsc, measure,
                       rotation_repeatability, scale_repeatability)
from .pipeline import JOBS_ENV, default_jobs, vectorize_image
from .raster import load_image
from .refine import EPSILON_FLAT, VectorizeParams
from .svgio import rasterize, rasterize_svg, write_svg


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _non_negative(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _level(text):
    v = float(text)
    if not 0 < v < 255:
        raise argparse.ArgumentTypeError("level must lie strictly between 0 and 255")
    return v


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("vectorization")
    g.add_argument("--tau-e", type=_positive(float), default=1.0,
                   help="maximum distance in px between outline and curve (default: 1, sub-pixel accuracy)")
    g.add_argument("--sigma0", type=_non_negative, default=1.0,
                   help="affine smoothing scale applied before fitting (default: 1)")
    g.add_argument("--level", type=_level, default=127.5,
                   help="gray level of the extracted outline (default: 127.5, midway for 8-bit)")
    g.add_argument("--epsilon-flat", type=_non_negative, default=EPSILON_FLAT,
                   help="tangent flatness below which a candidate is dropped (default: %(default)s)")
    g.add_argument("--merge", action="store_true",
                   help="merge neighbouring cubics when one cubic suffices (default: off)")
    g.add_argument("--invert", action="store_true",
                   help="treat light shapes on a dark background as the silhouette")
    g.add_argument("--jobs", type=_positive(int), default=None,
                   help="worker processes for multi-component inputs "
                        "(default: logical CPUs; SILHOUVEC_JOBS overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="silhouvec",
                                     description="Vectorize raster silhouettes into cubic Bezier outlines.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("vectorize", help="write an SVG for a raster silhouette")
    v.add_argument("input")
    v.add_argument("-o", "--output", required=True, help="SVG file to write")
    v.add_argument("--integer", action="store_true", help="round coordinates to integers")
    _add_params(v)

    d = sub.add_parser("eval-dsc", help="Dice coefficient between the input and its vectorization")
    d.add_argument("input")
    d.add_argument("--svg", help="compare against this SVG instead of vectorizing afresh")
    _add_params(d)

    r = sub.add_parser("eval-repeat", help="feature repeatability under rotation and scaling")
    r.add_argument("input")
    r.add_argument("--angles", type=_floats, default=list(ROTATIONS),
                   help="rotation angles in degrees (default: 10,20,...,350)")
    r.add_argument("--scales", type=_floats, default=list(SCALES),
                   help="scale factors (default: 0.5,0.6,...,2.0)")
    r.add_argument("--epsilon", type=_positive(float), default=REPEAT_EPSILON,
                   help="match radius in px (default: 1.5)")
    _add_params(r)

    s = sub.add_parser("stats", help="print a JSON metric report")
    s.add_argument("input")
    s.add_argument("--repeat", action="store_true", help="include the rotation repeatability sweep")
    _add_params(s)
    return parser


def _params(args) -> VectorizeParams:
    return VectorizeParams(tau_e=args.tau_e, sigma0=args.sigma0, level=args.level,
                           epsilon_flat=args.epsilon_flat, merge=args.merge)


def _jobs(args) -> int:
    if args.jobs is not None and not os.environ.get(JOBS_ENV):
        return args.jobs
    try:
        return default_jobs()
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load(args):
    raster = load_image(args.input)
    return raster.inverted() if args.invert else raster


def run_vectorize(args) -> int:
    raster = _load(args)
    t0 = time.perf_counter()
    outlines = vectorize_image(raster, _params(args), _jobs(args))
    elapsed = time.perf_counter() - t0
    try:
        size = write_svg(outlines, raster.width, raster.height, args.output, integer=args.integer)
    except OSError as exc:
        raise InputError(f"cannot write {args.output}: {exc}") from exc
    circles = sum(o.kind == "circle" for o in outlines)
    print(f"{args.output}: components={len(outlines)} circles={circles} "
          f"control_points={control_count(outlines)} bytes={size} seconds={elapsed:.3f}")
    return 0


def run_eval_dsc(args) -> int:
    raster = _load(args)
    if args.svg:
        try:
            other = rasterize_svg(args.svg)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read {args.svg}: {exc}") from exc
    else:
        outlines = vectorize_image(raster, _params(args), _jobs(args))
        other = rasterize(outlines, raster.width, raster.height)
    print(f"dsc={dsc(raster, other):.6f}")
    return 0


def run_eval_repeat(args) -> int:
    raster = _load(args)
    params, jobs = _params(args), _jobs(args)
    for title, rows in (("angle", rotation_repeatability(raster, args.angles, params, args.epsilon, jobs)),
                        ("scale", scale_repeatability(raster, args.scales, params, args.epsilon, jobs))):
        print(f"{title:>8}  ratio")
        for x, ratio in rows:
            print(f"{x:8.2f}  {ratio:.4f}")
        if rows:
            print(f"{'mean':>8}  {np.mean([q for _, q in rows]):.4f}")
    return 0


def run_stats(args) -> int:
    raster = _load(args)
    report = measure(raster, _params(args), _jobs(args),
                     repeat_angles=list(ROTATIONS) if args.repeat else None)
    print(report.to_json())
    return 0


COMMANDS = {
    "vectorize": run_vectorize,
    "eval-dsc": run_eval_dsc,
    "eval-repeat": run_eval_repeat,
    "stats": run_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, UndefinedMetricError) as exc:
        print(f"silhouvec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
