"""Batch front-end.

Exit codes: 0 when the command ran and everything it asserts holds, 1 on
file, parse or validation errors, 2 when a verification ran and failed
(duality mismatch, Stokes discrepancy on an admissible form, adjunction
failure, degenerate pairing).  A flagged hypothesis violation is a result,
not a failure: the Stokes counterexample exits 0 with its annotation.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .calculus import QuadratureSpec, pairing_matrix, stokes_check
from .charts import ChartSignature
from .cover import pd_symmetry_check, refinement_manifest, total_betti, total_compact_betti
from .errors import ExplocohError
from .intlinalg import mat, zeros
from .manifest import (
    parse_chart_file,
    parse_fan_file,
    parse_form_file,
    parse_manifest,
    parse_map_file,
    serialize_manifest,
)
from .orientation import OrientedMap, fiber_product_orientation, normal_bundle_sign


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as err:
        raise ExplocohError("cannot read %s: %s" % (path, err))


def _emit(args, human_lines, machine_lines):
    if args.format in ("text", "both"):
        for line in human_lines:
            print(line)
    if args.format in ("machine", "both") or args.format == "text":
        for line in machine_lines:
            print(line)


def _spec(args):
    return QuadratureSpec(tolerance=args.tolerance, max_depth=args.max_depth)


def cmd_cohomology(args):
    manifest = parse_manifest(_read(args.manifest))
    table = total_betti(manifest)
    if args.compact:
        table.compact = total_compact_betti(manifest).betti
    _emit(args, table.text().splitlines(), table.machine_lines())
    return 0


def cmd_pd_check(args):
    manifest = parse_manifest(_read(args.manifest))
    report = pd_symmetry_check(manifest)
    _emit(args, report.text().splitlines(), report.machine_lines())
    return 0 if report.passed else 2


def cmd_refine(args):
    fan = parse_fan_file(_read(args.fan))
    manifest = refinement_manifest(fan, fan.ambient_dim)
    text = serialize_manifest(manifest)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_stokes(args):
    _, sig = parse_chart_file(_read(args.chart))
    form = parse_form_file(_read(args.form), sig.n, sig.m)
    report = stokes_check(form, sig, _spec(args), boundary=args.boundary)
    _emit(args, report.text().splitlines(), report.machine_lines())
    if report.admissible and report.discrepancy > args.tolerance:
        return 2
    return 0


def cmd_pair(args):
    _, sig = parse_chart_file(_read(args.chart))
    result = pairing_matrix(sig, args.degree, _spec(args))
    _emit(args, result.text().splitlines(), result.machine_lines())
    return 0 if result.passed else 2


def cmd_orient(args):
    maps = parse_map_file(_read(args.mapfile))
    if "df" not in maps or "dg" not in maps:
        raise ExplocohError("map file needs df and dg entries")
    df_rows, dg_rows = maps["df"], maps["dg"]
    df = OrientedMap(mat(df_rows) if df_rows else zeros(0, 0))
    dg = OrientedMap(mat(dg_rows) if dg_rows else zeros(0, 0))
    fp = fiber_product_orientation(df, dg)
    nsign = normal_bundle_sign(df, dg)
    a, b, c = df.source_dim, dg.source_dim, df.target_dim
    human = [
        "fiber product dimension %d, orientation sign %+d" % (fp.dim, fp.sign),
        "normal bundle sign %+d (law predicts %+d)" % (nsign, (-1) ** (b * c)),
    ]
    machine = [
        "orientation %+d" % fp.sign,
        "normalsign %+d" % nsign,
    ]
    _emit(args, human, machine)
    return 0 if nsign == (-1) ** (b * c) else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="explocoh",
        description="Betti numbers, duality and integration checks for exploded manifolds",
    )
    parser.add_argument("--version", action="version", version="explocoh %s" % __version__)
    parser.add_argument("--tolerance", type=float, default=1e-6, help="numeric tolerance")
    parser.add_argument("--max-depth", type=int, default=20, help="quadrature refinement cap")
    parser.add_argument(
        "--format", choices=("text", "machine", "both"), default="text", help="output style"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cohomology", help="global Betti numbers of a cover manifest")
    p.add_argument("manifest")
    p.add_argument("--compact", action="store_true", help="add the compact-support row")
    p.set_defaults(run=cmd_cohomology)

    p = sub.add_parser("pd-check", help="Poincare duality symmetry check")
    p.add_argument("manifest")
    p.set_defaults(run=cmd_pd_check)

    p = sub.add_parser("refine", help="cover manifest of a toric refinement")
    p.add_argument("fan")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_refine)

    p = sub.add_parser("stokes", help="Stokes check of a form on a chart")
    p.add_argument("form")
    p.add_argument("chart")
    p.add_argument("--boundary", action="store_true", help="x1 ranges over (-inf, 0]")
    p.set_defaults(run=cmd_stokes)

    p = sub.add_parser("pair", help="numeric duality pairing matrix of a chart")
    p.add_argument("chart")
    p.add_argument("degree", type=int)
    p.set_defaults(run=cmd_pair)

    p = sub.add_parser("orient", help="fiber product orientation of two maps")
    p.add_argument("mapfile")
    p.set_defaults(run=cmd_orient)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ExplocohError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
