"""Command line entry point: ``mixholder {experiment,fit,eval,integrate,fbm}``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .exceptions import GuardError, InsufficientSamplesError
from .experiment import ExperimentConfig, emit_table, run_experiment
from .kaczmarz import FitConfig, fit_arrays, load_model, load_samples_csv, save_model
from .testfn import DEFAULT_LEVELS, MAX_LEVELS, fbm_generate

FULL_RANGE = (5, 18)


def parse_scales(text: str) -> tuple[int, int]:
    """``"5..12"`` -> ``(5, 12)``; a single integer gives a one-scale range."""
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scale range {text!r}; expected a..b") from None
    if lo_i < 0 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad scale range {text!r}")
    return lo_i, hi_i


def _experiment(args) -> int:
    settings = {}
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    if args.full:
        settings.update(m_range=FULL_RANGE, max_p=None, max_steps=None, fbm_levels=MAX_LEVELS)
    flags = {
        "d": args.dim, "m_range": args.scales, "c1": args.c1, "hurst": args.hurst,
        "seed": args.seed, "test_points": args.test_points, "shifts": args.shifts,
        "fbm_levels": args.fbm_levels, "workers": args.workers,
    }
    if args.scale is not None:
        flags["m_range"] = (args.scale, args.scale)
    settings.update({k: v for k, v in flags.items() if v is not None})
    if args.no_timing:
        settings["record_timing"] = False
    records = run_experiment(ExperimentConfig(**settings))
    text = emit_table(records, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)
    return 0


def _fit(args) -> int:
    X, y = load_samples_csv(args.samples, args.dim)
    steps = args.steps if args.steps is not None else len(y)
    model = fit_arrays(X, y, args.scale, FitConfig(c1=args.c1, n_override=steps, seed=args.seed))
    save_model(model, args.output)
    print(f"fitted d={model.d} m={model.m} p={model.weights.size} steps={model.n_steps} "
          f"-> {args.output}")
    return 0


def _eval(args) -> int:
    model = load_model(args.model)
    pts = np.atleast_2d(np.loadtxt(args.points, delimiter=",", ndmin=2))
    vals = model(pts)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        for v in vals:
            out.write(f"{float(v)!r}\n")
    finally:
        if args.output:
            out.close()
    return 0


def _integrate(args) -> int:
    print(repr(load_model(args.model).integrate()))
    return 0


def _fbm(args) -> int:
    path = fbm_generate(args.hurst, args.levels, args.seed)
    if args.output:
        path.to_csv(args.output)
    else:
        sys.stdout.write("node,value\n")
        for t, v in zip(path.nodes, path.values):
            sys.stdout.write(f"{float(t)!r},{float(v)!r}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixholder",
                                     description="Approximate mixed Hölder functions from random samples.")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="scale sweep on an fBm product test function")
    exp.add_argument("--config", help="JSON file with ExperimentConfig fields")
    exp.add_argument("--dim", type=int)
    exp.add_argument("--scales", type=parse_scales, help="inclusive range a..b (default 5..12)")
    exp.add_argument("--scale", type=int, help="single scale")
    exp.add_argument("--c1", type=float)
    exp.add_argument("--hurst", type=float)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--test-points", type=int)
    exp.add_argument("--shifts", type=int, help="spin-cycle over this many random shifts")
    exp.add_argument("--fbm-levels", type=int, help=f"fBm nodes = 2**J + 1 (default {DEFAULT_LEVELS})")
    exp.add_argument("--workers", type=int, help="scales fitted concurrently")
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.add_argument("--output")
    exp.add_argument("--full", action="store_true",
                     help=f"scales {FULL_RANGE[0]}..{FULL_RANGE[1]}, no resource ceilings")
    exp.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column")
    exp.set_defaults(run=_experiment)

    fit = sub.add_parser("fit", help="fit a model to CSV samples (coordinates..., value)")
    fit.add_argument("--samples", required=True)
    fit.add_argument("--dim", type=int)
    fit.add_argument("--scale", type=int, required=True)
    fit.add_argument("--c1", type=float, default=3.5)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--steps", type=int, help="Kaczmarz steps (default: number of samples)")
    fit.add_argument("--output", required=True)
    fit.set_defaults(run=_fit)

    ev = sub.add_parser("eval", help="evaluate a model at CSV points")
    ev.add_argument("--model", required=True)
    ev.add_argument("--points", required=True)
    ev.add_argument("--output")
    ev.set_defaults(run=_eval)

    integ = sub.add_parser("integrate", help="integral of a model over the unit cube")
    integ.add_argument("--model", required=True)
    integ.set_defaults(run=_integrate)

    fbm = sub.add_parser("fbm", help="sample an fBm path and write (node, value) CSV")
    fbm.add_argument("--hurst", type=float, default=0.8)
    fbm.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    fbm.add_argument("--seed", type=int, default=0)
    fbm.add_argument("--output")
    fbm.set_defaults(run=_fbm)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (GuardError, InsufficientSamplesError, ValueError, OSError) as exc:
        print(f"mixholder {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
