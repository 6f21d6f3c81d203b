"""Command-line entry point: ``aztec-dimers {sample, verify, spectral, experiment}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 runtime or domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .lattice import KASTELEYN_SIGN, AztecGraph, WeightScheme, heights_from_occupancy

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _provenance(args) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    return {"artifact_version": __version__, "config": config}


def _weights(args) -> WeightScheme:
    try:
        return WeightScheme.load(args.weights)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"cannot read weights: {exc}") from None


def _facets(args):
    from .fluctuations import FacetSpec

    try:
        if not args.facet:
            return [FacetSpec(mesh_exponent=args.mesh_exponent)]
        return [FacetSpec.parse(f, args.mesh_exponent) for f in args.facet]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_sample(args) -> int:
    from .fluctuations import FacetAverages, centre_readings, facet_grid
    from .render import write_tiling_svg
    from .shuffling import ShuffleSampler, sample_batch, sample_stream

    weights = _weights(args)
    if args.order_n < 1 or args.count < 1:
        raise ConfigError("--order-n and --count must be positive")
    graph = AztecGraph(args.order_n, weights)
    sampler = ShuffleSampler(graph)
    first = sampler.sample(sample_stream(args.seed, 0))
    payload = _provenance(args)
    payload["order"] = graph.order
    if args.count == 1:
        payload["assignment"] = first.assignment.tolist()
        payload["heights_even_faces"] = heights_from_occupancy(first.occupancy(graph)).tolist()
    if args.svg:
        write_tiling_svg(args.svg, graph, first)
    if args.csv or args.count > 1:
        facets = _facets(args)
        grids = [facet_grid(graph, f) for f in facets]
        batch = sample_batch(graph, args.seed, args.count, reducer=FacetAverages(grids),
                             workers=args.threads, tables=sampler.tables)
        raw = batch.stacked()
        if args.count > 1:
            z = centre_readings(raw, grids, "pooled").values
            payload["z_summary"] = {
                "count": args.count, "M": [g.M for g in grids],
                "variance": z.var(axis=0, ddof=1).tolist(),
                "variance_se": (z.var(axis=0, ddof=1) * np.sqrt(2.0 / (args.count - 1))).tolist(),
            }
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write("# " + json.dumps(_provenance(args), sort_keys=True) + "\n")
                fh.write("sample," + ",".join(f"facet_mean_{j + 1}" for j in range(raw.shape[1])) + "\n")
                for i, row in enumerate(raw):
                    fh.write(f"{i}," + ",".join(repr(float(v)) for v in row) + "\n")
    if args.out:
        _write_json(args.out, payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suites

    signs = KASTELEYN_SIGN
    if args.signs:
        try:
            signs = np.array([float(s) for s in args.signs.split(",")])
        except ValueError:
            raise ConfigError("--signs must be four comma-separated numbers") from None
        if signs.shape != (4,):
            raise ConfigError("--signs must be four comma-separated numbers")
    try:
        result = run_suites(args.suite, signs=signs)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None
    payload = {**_provenance(args), "suites": result, "pass": all(r["pass"] for r in result.values())}
    _write_json(args.out or "-", payload)
    return EXIT_OK if payload["pass"] else EXIT_FAIL


def cmd_spectral(args) -> int:
    from .spectral import (GenusAssumptionError, amoeba_raster, centred_variance,
                           characteristic_polynomial, period_genus1, predicted_Z_distribution)

    weights = _weights(args)
    P = characteristic_polynomial(weights)
    raster = amoeba_raster(P, resolution=args.resolution, window=args.window)
    expected = (weights.k - 1) * (weights.l - 1)
    payload = {**_provenance(args), "polynomial": P.to_dict(),
               "bounded_components": raster.bounded_components, "expected_genus": expected}
    if args.png:
        raster.to_png(args.png)
    if args.csv:
        raster.to_csv(args.csv)
    if raster.bounded_components < expected:
        _write_json(args.out or "-", payload)
        raise GenusAssumptionError(
            f"amoeba has {raster.bounded_components} compact oval(s), expected {expected}")
    a = weights.two_periodic_parameter()
    if a is not None:
        curve = period_genus1(a)
        params = predicted_Z_distribution(a)
        tau = complex(params.tau[0, 0])
        payload["genus1"] = curve.to_dict()
        payload["prediction"] = {"tau": [tau.real, tau.imag], "e": float(params.e[0]),
                                 "centred_variance": float(centred_variance(params)[0, 0])}
    _write_json(args.out or "-", payload)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .fluctuations import run_experiment

    weights = _weights(args)
    if args.order_n < 1:
        raise ConfigError("--order-n must be positive")
    if args.count < 2:
        raise ConfigError("--count must be at least 2 for pooled centering")
    report = run_experiment(weights, args.order_n, _facets(args), args.count, args.seed,
                            workers=args.threads)
    if args.csv:
        report.write_csv(args.csv)
    _write_json(args.out or "-", report.to_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aztec-dimers", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weights=True):
        if weights:
            p.add_argument("--weights", required=True, help="weight scheme JSON file or inline JSON")
        p.add_argument("--out", help="output JSON path (default: stdout)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("sample", help="draw exact random tilings")
    common(p)
    p.add_argument("--order-n", type=int, required=True, help="N; the diamond has order k*l*N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--svg", help="render the first sample as SVG")
    p.add_argument("--csv", help="per-sample facet averages as CSV")
    p.add_argument("--facet", action="append", help='rectangle "xi0,eta0,xi1,eta1"')
    p.add_argument("--mesh-exponent", type=float, default=15 / 16)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run the built-in oracle suites")
    common(p, weights=False)
    p.add_argument("--suite", action="append", help="kasteleyn, sampler or spectral (repeatable)")
    p.add_argument("--signs", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectral", help="characteristic polynomial, amoeba and genus-1 data")
    common(p)
    p.add_argument("--png", help="amoeba image")
    p.add_argument("--csv", help="amoeba point cloud")
    p.add_argument("--resolution", type=int, default=300)
    p.add_argument("--window", type=float, default=4.0)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("experiment", help="Monte Carlo test of the discrete-component law")
    common(p)
    p.add_argument("--order-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=2000)
    p.add_argument("--csv", help="Z readings as CSV")
    p.add_argument("--facet", action="append", help='rectangle "xi0,eta0,xi1,eta1"')
    p.add_argument("--mesh-exponent", type=float, default=15 / 16)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # domain and runtime failures
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
