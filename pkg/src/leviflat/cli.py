"""Command-line front end: ``leviflat {build,check,planes,classify,probe,slice}``.

Exit codes: 0 success or verdict true, 1 verdict false, 2 input or
structural error.  JSON floats are printed with 17 significant digits so
identical runs produce identical bytes.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import grassmann, levicheck, probe
from .bipoly import BiForm, GaussianRational, format_form, parse_form
from .cones import (Hypersurface, ImplicitCurve, ParametricCurve, analytic_cone_sampler,
                    grassmann_cone_from_plane_curve, implicit_cone_sampler,
                    pencil_cone, read_curve_file, umbrella)
from .errors import LeviFlatError, StructuralError

DEFAULT_SEED = 42


# output ---------------------------------------------------------------------------

def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON with fixed 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# inputs -----------------------------------------------------------------------------

def data_path(name):
    """Path of a bundled curve file (``circle.curve``, ``quartic.curve``, ...)."""
    return Path(str(resources.files("leviflat") / "data" / name))


def _resolve(path):
    p = Path(path)
    if not p.exists() and data_path(p.name).exists():
        return data_path(p.name)
    return p


def load_form(path):
    """Read a ``.form`` file and its optional ``.json`` sidecar into a Hypersurface.

    Without a sidecar a bihomogeneous form is taken as projective and
    anything else as affine in chart 0.
    """
    path = _resolve(path)
    text = path.read_text(encoding="utf-8")
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if body.startswith("form:"):
        body = body[len("form:"):]
    side = Path(str(path) + ".json")
    meta = json.loads(side.read_text(encoding="utf-8")) if side.exists() else {}
    form = parse_form(body, meta.get("nvars"))
    if form.nvars < 2:
        form = parse_form(body, 3)
    n = meta.get("n", form.nvars - 1)
    chart = meta.get("chart", "unset")
    if chart == "unset":
        bd = form.bidegree()
        chart = None if bd is not None and bd[0] == bd[1] and bd[0] >= 1 else 0
    return Hypersurface(n, form, chart, meta.get("provenance", path.name))


def _parse_point(text, H):
    vals = [GaussianRational.parse(s.strip()) for s in text.split(",")]
    if len(vals) == H.n:
        vals.insert(H.default_chart(), GaussianRational(1))
    if len(vals) != H.n + 1:
        raise StructuralError(f"point needs {H.n} chart or {H.n + 1} homogeneous coordinates")
    return vals


# subcommands -------------------------------------------------------------------------

def cmd_build(args):
    if args.kind == "umbrella":
        H = umbrella()
        stem = "umbrella"
    else:
        if not args.input:
            raise StructuralError(f"build {args.kind} needs a curve file")
        src = read_curve_file(_resolve(args.input))
        stem = Path(args.input).stem
        if args.kind == "grassmann":
            if not isinstance(src, ImplicitCurve):
                raise StructuralError("build grassmann needs an implicit curve")
            H = grassmann_cone_from_plane_curve(src, args.n)
        else:
            if not isinstance(src, BiForm):
                raise StructuralError("build pencil needs a 'form:' line")
            if src.nvars < 3:
                src = src.reindex(3, {i: i for i in range(src.nvars)})
            H = pencil_cone(src, args.n)
    out = Path(args.output or f"{stem}.form")
    out.write_text(format_form(H.defining) + "\n", encoding="utf-8", newline="\n")
    meta = {
        "nvars": H.defining.nvars, "n": H.n, "chart": H.chart,
        "bidegree": list(H.homogeneous().bidegree()),
        "hermitian": H.defining.is_hermitian(), "provenance": H.provenance,
        "terms": len(H.defining),
    }
    Path(str(out) + ".json").write_text(dumps(meta), encoding="utf-8", newline="\n")
    sys.stdout.write(dumps(dict(meta, output=str(out))))
    return 0


def _tolerances(args):
    tol = dict(levicheck.TOLERANCES)
    if args.tol is not None:
        tol["flat"] = args.tol
    return tol


def cmd_check(args):
    tol = _tolerances(args)
    if args.what == "handle":
        count = args.points if args.points is not None else 100000
        rep = levicheck.umbrella_handle_check(count, args.seed)
        obj = levicheck.report_json(
            "handle", rep.samples, max(rep.handle_residuals, default=0.0), rep.verdict, args.seed,
            tol, nearSlice=rep.near_slice, minSliceMargin=rep.min_slice_margin,
            handleDistances=rep.handle_distances, note=rep.note, warnings=rep.warnings)
        _emit(dumps(obj), args.output)
        return 0 if rep.verdict else 1
    if not args.form:
        raise StructuralError(f"check {args.what} needs a form file")
    H = load_form(args.form)
    count = args.points if args.points is not None else 100
    if args.what == "foliation":
        verdict = levicheck.euler_foliation_check(H)
        pts = levicheck.sample_points(H, args.chart, count, args.seed)
        omega = levicheck.OneForm.pencil(H.defining.nvars)
        rep = levicheck.foliation_tangency_numeric(H, omega, pts)
        obj = levicheck.report_json("foliation", len(pts), rep.max_residual, verdict, args.seed,
                                    tol, euler=verdict, skipped=rep.skipped)
        _emit(dumps(obj), args.output)
        return 0 if verdict else 1
    pts = levicheck.sample_points(H, args.chart, count, args.seed)
    worst = 0.0
    verdict = True
    for p in pts:
        if args.what == "levi":
            r = np.linalg.norm(levicheck.levi_form(H, p), 2)
        else:
            hh, mixed = levicheck.hessian_on_tangent(H, p)
            r = max(np.linalg.norm(hh, 2), np.linalg.norm(mixed, 2))
        r /= p.scale
        worst = max(worst, r)
        verdict &= bool(r <= tol["flat"])
    obj = levicheck.report_json(args.what, len(pts), worst, verdict, args.seed, tol)
    _emit(dumps(obj), args.output)
    return 0 if verdict else 1


def cmd_planes(args):
    H = load_form(args.form)
    if args.point:
        p = _parse_point(args.point, H)
        res = grassmann.planes_through_point(H, p, resolution=args.resolution)
        obj = dict(res.to_json_obj(), point=[grassmann._fmt_coord(x) for x in p], seed=args.seed)
        _emit(dumps(obj), args.output)
        return 0
    pts = levicheck.sample_points(H.projectivized(), None, args.points, args.seed)
    rho = H.homogeneous()
    planes, residuals = [], []
    for pt in pts:
        z = pt.homogeneous()
        g = [complex(rho.partial("holo", i).compile().diag(z)) for i in range(rho.nvars)]
        L = grassmann.Hyperplane(g)
        planes.append(L.to_text())
        residuals.append(grassmann.hyperplane_residual(H, L))
    obj = {"verdict": "sweep", "planes": planes, "residuals": residuals, "seed": args.seed}
    _emit(dumps(obj), args.output)
    return 0


def cmd_classify(args):
    H = load_form(args.form)
    rep = grassmann.classify(H, samples=args.points, seed=args.seed)
    obj = dict(rep.to_json_obj(), seed=args.seed)
    _emit(dumps(obj), args.output)
    return 0


def cmd_probe(args):
    curve = read_curve_file(_resolve(args.curve))
    if isinstance(curve, ParametricCurve):
        def sampler(seed, count):
            return analytic_cone_sampler(curve, seed, count)
    elif isinstance(curve, ImplicitCurve):
        def sampler(seed, count):
            return implicit_cone_sampler(curve, seed, count)
    else:
        raise StructuralError("probe needs an implicit or parametric curve")
    certs = probe.nonalgebraicity_certificate(sampler, args.kmax, args.rows, args.seed)
    obj = probe.certificate_report(certs, args.seed)
    _emit(dumps(obj), args.output)
    return 0 if all(c.nonvanishing for c in certs) else 1


def cmd_slice(args):
    H = load_form(args.form)
    name, _, val = args.fix.partition("=")
    rows = levicheck.slice_points(H, name.strip(), float(val), grid=args.grid,
                                  box=args.box, solve=args.solve)
    _emit(levicheck.slice_csv(rows), args.output)
    return 0


# parser ------------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="leviflat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("-o", "--output", help="output path (default: stdout)")

    p = sub.add_parser("build", help="construct a defining form")
    p.add_argument("kind", choices=["pencil", "grassmann", "umbrella"])
    p.add_argument("input", nargs="?", help="curve file")
    p.add_argument("-n", type=int, default=2, help="ambient projective dimension")
    p.add_argument("-o", "--output", help="form file to write (sidecar gets .json)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="Levi-flatness, leaves, foliation, umbrella handle")
    p.add_argument("what", choices=["levi", "leaves", "foliation", "handle"])
    p.add_argument("form", nargs="?")
    p.add_argument("--points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--chart", type=int)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("planes", help="contained lines through a point")
    p.add_argument("form")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--point", help="comma-separated coordinates, e.g. 0,0 or 1,0,0")
    g.add_argument("--sweep", action="store_true", help="leaf planes at sampled points")
    p.add_argument("--resolution", type=int, default=4096)
    p.add_argument("--points", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_planes)

    p = sub.add_parser("classify", help="label dim H_s (critical-locus heuristic)")
    p.add_argument("form")
    p.add_argument("--points", type=int, default=12)
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("probe", help="rank certificates for a curve's swept cone")
    p.add_argument("curve")
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--rows", type=int, help="rows per degree (default 2 x basis size)")
    common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("slice", help="CSV of a real 3-slice of the zero set")
    p.add_argument("form")
    p.add_argument("--fix", required=True, help="e.g. x=0")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--box", type=float, default=2.0)
    p.add_argument("--solve", choices=list(levicheck.REAL_NAMES))
    common(p)
    p.set_defaults(func=cmd_slice)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LeviFlatError, OSError, ValueError) as exc:
        sys.stderr.write(f"leviflat: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
