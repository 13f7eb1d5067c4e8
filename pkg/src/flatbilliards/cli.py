"""Command line front end.

    flatbilliards double    --in square.json --out surface.json
    flatbilliards trace     --in square.json --start 0.5 0.3 --dir 1 0 --length 10 --out t.json
    flatbilliards cylinders --in surface.json --eps 0.1 --out cyl.json --svg cyl.svg
    flatbilliards check-cc  --in square.json --eps 0.1 --samples 1000 --length 100 --out cc.json
    flatbilliards spectrum  --in square.json --h 0.05 --k 10 --bc dirichlet --out eig.csv
    flatbilliards control   --in square.json --eps 0.25 --bc dirichlet --k 100 --h 0.02 --out r.csv
    flatbilliards bz-check  --count 50 --n 256 --out bz.csv

Exit codes: 0 ok, 2 bad input, 3 solver failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bz, cylinders, flow, reports, spectral
from .polygon import Polygon, PolygonError
from .surface import FlatSurface, SurfaceError, double
from .unfolding import SearchLimitExceeded

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_USAGE = 0, 2, 3, 64
WORKERS_ENV = "FLATBILLIARDS_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_help()}")


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _read(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _mode(args):
    return {"auto": None, "exact": True, "float": False}[args.mode]


def load_polygon(path: str, mode=None) -> Polygon:
    doc = _read(path)
    if "outer" not in doc:
        raise PolygonError(f"{path} is not a polygon document")
    return Polygon.from_coords(doc["outer"], doc.get("holes", []), doc.get("slits", []), exact=mode)


def load_surface(path: str, mode=None) -> FlatSurface:
    """A surface file, or a polygon file that gets doubled."""
    doc = _read(path)
    if "triangles" in doc:
        s = FlatSurface.from_json(json.dumps(doc))
        return s.as_float() if mode is False else s
    return double(load_polygon(path, mode))


def _num(text: str):
    from .scalar import is_rational_input, parse_number
    return parse_number(text, is_rational_input(text))


def cmd_double(args) -> int:
    s = double(load_polygon(args.inp, _mode(args)))
    reports.write_atomic(args.out, s.to_json() + "\n")
    print(f"{len(s.cone_points)} cone points, area {float(s.area):g}, "
          f"euler characteristic {s.euler_characteristic()}")
    return EXIT_OK


def cmd_trace(args) -> int:
    doc = _read(args.inp)
    point = tuple(_num(v) for v in args.start)
    direction = tuple(_num(v) for v in args.dir)
    if "triangles" in doc:
        s = load_surface(args.inp, _mode(args))
        start = flow.locate_in_sheet(s, point, direction, args.sheet)
        traj = flow.trace(s, start, args.length, args.cone_tol)
    else:
        p = load_polygon(args.inp, _mode(args))
        s = double(p)
        traj = flow.billiard_trace(p, point, direction, args.length, args.cone_tol, surface=s)
    reports.write_atomic(args.out, flow.trajectory_to_json(s, traj) + "\n")
    if args.svg:
        tris, line = flow.develop(s, traj)
        reports.write_atomic(args.svg, reports.svg_development(tris, line, {"kind": traj.termination.kind}))
    term = traj.termination
    extra = f" period {term.period:.9g}" if traj.is_periodic else ""
    print(f"{term.kind}{extra} after {len(traj.segments)} segments")
    return EXIT_OK


def cmd_cylinders(args) -> int:
    s = load_surface(args.inp, _mode(args))
    eps = _num(args.eps)
    cyls = cylinders.enumerate_maximal_cylinders(s, eps, l_max=args.l_max)
    reports.write_atomic(args.out, cylinders.cylinders_to_json(s, cyls, eps) + "\n")
    if args.svg:
        reports.write_atomic(args.svg, cylinders.cylinders_svg(s, cyls))
    bound = cylinders.cylinder_volume_bound(s, eps)
    print(f"{len(cyls)} maximal cylinders (volume bound {bound:.6g})")
    return EXIT_OK


def cmd_check_cc(args) -> int:
    s = load_surface(args.inp, _mode(args))
    eps = _num(args.eps)
    cyls = cylinders.enumerate_maximal_cylinders(s, eps)
    rep = cylinders.check_cc(s, float(eps), args.samples, args.length, seed=args.seed, cylinders=cyls)
    doc = {"seed": args.seed, "eps": float(eps), "samples": rep.samples, "orbit_length": rep.orbit_length,
           "cylinders": len(cyls), "counts": rep.counts,
           "violations": [{"triangle": v.start.triangle, "position": list(v.start.position),
                           "direction": list(v.start.direction), "min_distance": v.min_distance}
                          for v in rep.violations]}
    reports.write_json(args.out, doc)
    print(f"{rep.counts}; {len(rep.violations)} violations")
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_spectrum(args) -> int:
    p = load_polygon(args.inp, False)
    mesh = spectral.mesh_polygon(p, args.h)
    pairs = spectral.solve_eigs(mesh, args.bc, args.k)
    meta = {"seed": args.seed, "bc": args.bc, "h": args.h, "vertices": mesh.n_vertices}
    reports.write_csv(args.out, ["k", "lambda_sq", "residual"],
                      [(i + 1, e.lambda_sq, e.residual) for i, e in enumerate(pairs)], meta)
    if args.svg:
        e = pairs[args.plot - 1]
        reports.write_atomic(args.svg, reports.svg_heatmap(mesh.vertices, mesh.triangles, e.u,
                                                           {**meta, "k": args.plot}))
    return EXIT_OK


def cmd_control(args) -> int:
    p = load_polygon(args.inp, False)
    rep = spectral.control_constant(p, args.eps, args.bc, args.k, args.h, shape=args.shape)
    meta = {"seed": args.seed, "eps": args.eps, "bc": args.bc, "h": args.h, "shape": args.shape}
    rows = [(i + 1, lam, r, sr) for i, (lam, r, sr) in
            enumerate(zip(rep.lambdas, rep.ratios, rep.space_ratios))]
    reports.write_csv(args.out, ["k", "lambda_sq", "ratio", "eigenspace_min_ratio"], rows, meta)
    summary = args.summary or os.path.splitext(args.out)[0] + ".json"
    reports.write_json(summary, {**meta, "k_max": args.k, "c_hat": rep.c_hat, "argmin": rep.argmin + 1,
                                 "min_basis_ratio": float(rep.ratios.min()),
                                 "mesh_vertices": rep.n_vertices})
    if args.svg:
        reports.write_atomic(args.svg, reports.svg_scatter(np.sqrt(rep.lambdas), rep.ratios,
                                                           "lambda", "mass ratio", meta, logy=True))
    print(f"c_hat = {rep.c_hat:.6g} (eigenpair {rep.argmin + 1})")
    return EXIT_OK


def cmd_bz_check(args) -> int:
    lambdas = np.linspace(args.lambda_min, args.lambda_max, args.count)
    res = bz.sweep(args.l, args.a, lambdas, tuple(args.omega_y), args.n, seed=args.seed,
                   k_max=args.band, workers=_workers())
    meta = {"seed": args.seed, "l": args.l, "a": args.a, "omega_y": f"{args.omega_y[0]}:{args.omega_y[1]}",
            "n": args.n, "band": args.band}
    reports.write_csv(args.out, ["lambda", "ratio", "kernel_norm"],
                      [(r.lam, r.ratio, r.kernel_norm) for r in res], meta)
    if args.summary:
        reports.write_json(args.summary, {**meta, "max_ratio": max(r.ratio for r in res)})
    print(f"max ratio {max(r.ratio for r in res):.6g} over {len(res)} values")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flatbilliards", description="Flat surfaces, billiard cylinders and eigenfunction mass.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--in", dest="inp", required=True, help="polygon or surface JSON")
        sp.add_argument("--out", required=True)
        sp.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("double", help="double a polygon into a flat surface")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_double)

    sp = sub.add_parser("trace", help="trace a billiard orbit or geodesic")
    common(sp, seed=False)
    sp.add_argument("--start", nargs=2, required=True, metavar=("X", "Y"))
    sp.add_argument("--dir", nargs=2, required=True, metavar=("DX", "DY"))
    sp.add_argument("--length", type=float, required=True)
    sp.add_argument("--cone-tol", type=float, default=1e-9)
    sp.add_argument("--sheet", type=int, choices=[0, 1], default=0)
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("cylinders", help="maximal cylinders avoiding the eps-neighbourhood")
    common(sp, seed=False)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--l-max", type=float)
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_cylinders)

    sp = sub.add_parser("check-cc", help="sample orbits and check cylinder membership")
    common(sp)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--length", type=float, default=100.0)
    sp.set_defaults(func=cmd_check_cc)

    sp = sub.add_parser("spectrum", help="finite element eigenvalues")
    common(sp)
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--bc", choices=[spectral.DIRICHLET, spectral.NEUMANN], default=spectral.DIRICHLET)
    sp.add_argument("--svg")
    sp.add_argument("--plot", type=int, default=1, help="eigenfunction drawn with --svg")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("control", help="eigenfunction mass near the vertices")
    common(sp)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--k", type=int, default=100)
    sp.add_argument("--bc", choices=[spectral.DIRICHLET, spectral.NEUMANN], default=spectral.DIRICHLET)
    sp.add_argument("--shape", choices=["disk", "box"], default="disk")
    sp.add_argument("--summary")
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_control)

    sp = sub.add_parser("bz-check", help="torus resolvent estimate sweep")
    sp.add_argument("--out", required=True)
    sp.add_argument("--l", type=float, default=1.0)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--lambda-min", type=float, default=10.0)
    sp.add_argument("--lambda-max", type=float, default=500.0)
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--band", type=int, default=32)
    sp.add_argument("--omega-y", type=float, nargs=2, default=[0.4, 0.6])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--summary")
    sp.set_defaults(func=cmd_bz_check)
    return ap


def _check_positive(args) -> None:
    for name in ("length", "h", "k", "samples", "count", "n", "l", "a"):
        v = getattr(args, name, None)
        if v is not None and float(v) <= 0:
            raise ValueError(f"--{name} must be positive")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        _check_positive(args)
        return args.func(args)
    except (spectral.SolverNoConvergence, spectral.MeshFailure, SearchLimitExceeded,
            bz.ResonanceSingular) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (PolygonError, SurfaceError, ValueError, KeyError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
