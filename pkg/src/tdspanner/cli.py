"""Command line front end: build, verify, gen, render and bench.

Exit codes: 0 success, 1 usage or I/O error, 2 certification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import statistics
import sys
import time

import numpy as np

from . import geometry as geo
from . import io as tio
from .construct import build_spanner_from_td
from .delaunay import build_td
from .errors import GeneralPositionFailure, SpannerError
from .generators import KINDS, GenSpec, generate
from .verify import verify_spanner

log = logging.getLogger("tdspanner")

EXIT_OK, EXIT_USAGE, EXIT_CERT = 0, 1, 2


class UsageError(Exception):
    pass


def _rotation_arg(text: str):
    if text == "auto":
        return None
    try:
        angle = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an angle in radians, got {text!r}")
    if not math.isfinite(angle):
        raise argparse.ArgumentTypeError("rotation must be finite")
    return angle


def _rotate(points, angle: float | None):
    """Apply an explicit rotation (checked) or pick one automatically."""
    if angle is None:
        return geo.ensure_general_position(points)
    rotated = geo.rotate_points(points, angle)
    xs = np.array([p.x for p in rotated])
    ys = np.array([p.y for p in rotated])
    if not geo.is_general_position(xs, ys):
        raise GeneralPositionFailure(f"rotation {angle!r} does not give general position")
    return rotated, angle


def construct(points, naive: bool = False, angle: float | None = None):
    """Rotate, triangulate and build the spanner; returns (spanner, triangulation)."""
    rotated, angle = _rotate(points, angle)
    g = build_td(rotated, naive=naive)
    return build_spanner_from_td(g, angle), g


def cmd_build(args) -> int:
    points = tio.read_points(args.input, args.format)
    t0 = time.perf_counter()
    s, _ = construct(points, args.naive, args.rotate)
    log.info("built %d edges on %d points in %.1f ms", s.m, s.n, 1e3 * (time.perf_counter() - t0))
    tio.write_graph(args.output, s)
    return EXIT_OK


def cmd_verify(args) -> int:
    points = tio.read_points(args.points, args.format)
    graph = tio.read_graph(args.graph)
    rotated = geo.rotate_points(points, graph.rotation_applied)
    s = graph.to_spanner(rotated)

    t0 = time.perf_counter()
    g = build_td(rotated)
    rebuilt = build_spanner_from_td(g, graph.rotation_applied)
    build_ms = 1e3 * (time.perf_counter() - t0)

    report = verify_spanner(s, g, bounds=args.bounds, charging=args.charging, structure=args.structure)
    stats = tio.stats_dict(report, None if args.no_timing else round(build_ms, 3))
    stats["baseline"] = args.baseline
    if args.baseline == "td":
        stats["stretch"], stats["tri_stretch"] = stats["tri_stretch"], stats["stretch"]
    stats["rotation_applied"] = graph.rotation_applied
    stats["matches_construction"] = set(rebuilt.edges) == graph.edge_set()
    if args.stats:
        tio.write_stats(args.stats, stats)
    else:
        print(json.dumps(stats, indent=2, sort_keys=True))

    failures = report.failures()
    for f in failures:
        print(f"certification failed: {f}", file=sys.stderr)
    if not stats["matches_construction"]:
        log.warning("graph file differs from the construction on these points")
    return EXIT_CERT if failures else EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(
        kind=args.kind, n=args.n, seed=args.seed, rho=args.rho, rows=args.rows, cols=args.cols,
        clusters=args.clusters, sigma=args.sigma,
    )
    tio.write_points(args.out, generate(spec))
    return EXIT_OK


def cmd_render(args) -> int:
    points = tio.read_points(args.points, args.format)
    graph = tio.read_graph(args.graph)
    if len(points) != graph.n:
        raise UsageError(f"graph has n={graph.n} but {args.points} holds {len(points)} points")
    tio.render_svg(geo.rotate_points(points, graph.rotation_applied), graph, args.out)
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(float(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def bench(sizes, seed: int = 0, runs: int = 3, kind: str = "uniform") -> list[dict]:
    """Wall-clock time of the full construction per size (points pre-generated)."""
    construct(generate(GenSpec(kind, n=64, seed=seed)))  # warm caches and the JIT
    rows = []
    for n in sizes:
        points = generate(GenSpec(kind, n=n, seed=seed))
        times = []
        for _ in range(runs):
            t0 = time.perf_counter()
            construct(points)
            times.append(time.perf_counter() - t0)
        rows.append({"n": n, "mean_s": statistics.fmean(times), "min_s": min(times), "runs": runs})
    for prev, row in zip(rows, rows[1:]):
        row["ratio_to_prev"] = row["mean_s"] / prev["mean_s"]
    return rows


def cmd_bench(args) -> int:
    rows = bench(args.sizes, args.seed, args.runs, args.kind)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'n':>9} {'mean s':>9} {'min s':>9} {'ratio':>7}")
        for r in rows:
            ratio = f"{r['ratio_to_prev']:.2f}" if "ratio_to_prev" in r else "-"
            print(f"{r['n']:>9} {r['mean_s']:>9.3f} {r['min_s']:>9.3f} {ratio:>7}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdspanner", description="Degree-4 plane spanners of the TD-Delaunay graph.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    fmt = dict(choices=("csv", "json"), default=None, help="point file format (default: by extension)")

    b = sub.add_parser("build", help="construct the spanner of a point file")
    b.add_argument("--input", required=True)
    b.add_argument("--output", required=True)
    b.add_argument("--naive", action="store_true", help="use the quadratic triangulation")
    b.add_argument("--rotate", type=_rotation_arg, default=None, metavar="auto|RADIANS")
    b.add_argument("--format", **fmt)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="certify a graph file against its points")
    v.add_argument("--points", required=True)
    v.add_argument("--graph", required=True)
    v.add_argument("--bounds", action="store_true", help="run the per-class distance bound audit")
    v.add_argument("--charging", action="store_true", help="run the degree charging audit")
    v.add_argument("--structure", action="store_true", help="run the structural audits")
    v.add_argument("--baseline", choices=("complete", "td"), default="complete")
    v.add_argument("--stats", help="write the stats JSON here instead of stdout")
    v.add_argument("--no-timing", action="store_true", help="write build_ms as null")
    v.add_argument("--format", **fmt)
    v.set_defaults(func=cmd_verify)

    gn = sub.add_parser("gen", help="generate a point set")
    gn.add_argument("--kind", required=True, choices=KINDS)
    gn.add_argument("--n", type=int, default=0)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--out", required=True)
    gn.add_argument("--rho", type=float)
    gn.add_argument("--rows", type=int)
    gn.add_argument("--cols", type=int)
    gn.add_argument("--clusters", type=int, default=5)
    gn.add_argument("--sigma", type=float, default=0.03)
    gn.set_defaults(func=cmd_gen)

    r = sub.add_parser("render", help="draw a graph file as SVG")
    r.add_argument("--points", required=True)
    r.add_argument("--graph", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--format", **fmt)
    r.set_defaults(func=cmd_render)

    bn = sub.add_parser("bench", help="time the construction at several sizes")
    bn.add_argument("--sizes", type=_sizes, default=_sizes("1e3,1e4,1e5"))
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--runs", type=int, default=3)
    bn.add_argument("--kind", choices=KINDS, default="uniform")
    bn.add_argument("--json", action="store_true")
    bn.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, UsageError, SpannerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
