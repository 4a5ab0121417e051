"""Command-line interface.

Angles are given in degrees; every angle flag also has ``-deg`` and ``-rad``
spellings. ``--config FILE`` reads a JSON object whose keys are flag names
(dashes or underscores); flags given on the command line win.
Exit status: 0 on success, 1 on solver failure, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as cio
from .antifrustum import AntiFrustumDesign, build_snap_pair, build_tower
from .crease import develop, write_pattern
from .crosssection import cross_section, cross_section_at_height, equivalent_cone_angle
from .geometry import ConeSpec
from .mesh import obj_text, read_obj, write_obj
from .selfintersect import classify_pair, verify_theorem
from .snappability import antifrustum_snappability, snap_branch_point, spiral_snappability
from .spiral import (
    PyramidBase,
    SpiralRealization,
    build_spiral_mesh,
    find_pyramid_realization,
    find_shaky,
    solve_point,
    trace_curve,
    tristable_search,
)

ANGLES = ("lambda", "lambda_plus", "lambda_minus", "lambda_circ", "gamma")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _angle(p: argparse.ArgumentParser, name: str, nargs=None) -> None:
    flag = name.replace("_", "-")
    g = p.add_mutually_exclusive_group(required=False)
    g.add_argument(f"--{flag}", f"--{flag}-deg", dest=f"{name}_deg", type=float, nargs=nargs, help=f"{flag} in degrees")
    g.add_argument(f"--{flag}-rad", dest=f"{name}_rad", type=float, nargs=nargs, help=f"{flag} in radians")


def _common(p: argparse.ArgumentParser, *angles: str, n: bool = True, out: bool = True) -> None:
    if n:
        p.add_argument("--n", type=int, required=False)
    for a in angles:
        _angle(p, a)
    if out:
        p.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    p.add_argument("--config", type=Path, help="JSON file with flag values")


def build_parser() -> tuple[argparse.ArgumentParser, dict[tuple[str, ...], argparse.ArgumentParser]]:
    parser = _Parser(prog="conefold", description="Snapping conical bar-joint structures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    reg: dict[tuple[str, ...], argparse.ArgumentParser] = {}

    p = sub.add_parser("antifrustum", help="anti-frustum snap pair and tower mesh")
    _common(p, "lambda_plus", "lambda_minus", "gamma")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--sign", choices=("plus", "minus"), default="plus")
    p.add_argument("--mirror", action="store_true")
    reg[("antifrustum",)] = p

    sp = sub.add_parser("spiral", help="spiral-motion designs").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = sp.add_parser("solve", help="partners of a realization")
    _common(p, "lambda_plus", "lambda_minus")
    p.add_argument("--c-minus", type=float)
    reg[("spiral", "solve")] = p
    p = sp.add_parser("trace", help="design curve as CSV")
    _common(p, "lambda_plus", "lambda_minus")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--c-min", type=float, default=-0.99)
    p.add_argument("--c-max", type=float, default=0.99)
    reg[("spiral", "trace")] = p
    p = sp.add_parser("shaky", help="shaky realizations on one cone")
    _common(p, "lambda")
    reg[("spiral", "shaky")] = p
    p = sp.add_parser("pyramid", help="partners of a pyramid realization")
    _common(p, "lambda")
    p.add_argument("--base", type=str, help="k or k/d")
    reg[("spiral", "pyramid")] = p
    p = sp.add_parser("tristable", help="three realizations on three cones")
    _common(p, "lambda_plus", "lambda_circ", "lambda_minus")
    reg[("spiral", "tristable")] = p
    p = sp.add_parser("mesh", help="OBJ mesh of one realization")
    _common(p, "lambda")
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--vertices", type=int)
    reg[("spiral", "mesh")] = p

    p = sub.add_parser("crosssection", help="cut orthogonal to the cone axis")
    _common(p, "lambda")
    p.add_argument("--c", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--scale", type=float, default=1.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--height", type=float)
    g.add_argument("--alpha", type=float)
    reg[("crosssection",)] = p

    sn = sub.add_parser("snappability", help="snappability index").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = sn.add_parser("antifrustum")
    _common(p, "lambda_plus")
    _angle(p, "gamma", nargs="+")
    p.add_argument("--mode", choices=("rough", "improved"), default="rough")
    reg[("snappability", "antifrustum")] = p
    p = sn.add_parser("spiral")
    _common(p, "lambda")
    p.add_argument("--c-minus", type=float, nargs="+")
    p.add_argument("--mode", choices=("rough", "improved"), default="rough")
    p.add_argument("--json", type=Path, help="also write full results as JSON")
    reg[("snappability", "spiral")] = p

    vp = sub.add_parser("verify").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = vp.add_parser("theorem", help="numeric check of a self-intersection theorem")
    _common(p, "lambda")
    p.add_argument("--id", type=int, choices=range(1, 7))
    reg[("verify", "theorem")] = p

    p = sub.add_parser("develop", help="crease pattern (SVG plus JSON) of an OBJ mesh")
    p.add_argument("--mesh", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--config", type=Path)
    reg[("develop",)] = p
    return parser, reg


def _apply_config(args: argparse.Namespace, sub: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    dests = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest in ANGLES:
            dest += "_deg"
        if dest not in dests:
            raise UsageError(f"unknown config key {key!r}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return sub.parse_args(argv)


def _rad(args, name: str):
    deg, rad = getattr(args, f"{name}_deg", None), getattr(args, f"{name}_rad", None)
    if rad is not None:
        return rad
    if deg is not None:
        return [math.radians(x) for x in deg] if isinstance(deg, list) else math.radians(deg)
    raise UsageError(f"--{name.replace('_', '-')} is required")


def _need(args, *names: str):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        cio.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cone(args, name: str) -> ConeSpec:
    return ConeSpec(_rad(args, name))


def _run(args) -> int:
    cmd = (args.command,) + ((args.action,) if getattr(args, "action", None) else ())
    if cmd == ("antifrustum",):
        _need(args, "n")
        design = AntiFrustumDesign(args.n, _rad(args, "gamma"), _cone(args, "lambda_plus"), _cone(args, "lambda_minus"), args.mirror)
        if args.out:
            write_obj(build_tower(design, args.sign, args.levels), args.out)
        r_minus, r_plus = build_snap_pair(design)
        summary = {
            "n": design.n,
            "r": design.r,
            "h_minus": design.h_minus,
            "h_plus": design.h_plus,
            "edge_lengths": r_minus.edge_lengths()[[0, 2 * design.n, 2 * design.n + 1]],
            "pluecker_rank": {"minus": r_minus.pluecker_rank(), "plus": r_plus.pluecker_rank()},
        }
        if not args.out:
            sys.stdout.write(cio.json_text(summary))
        return 0
    if cmd == ("spiral", "solve"):
        _need(args, "n", "c_minus")
        pts = solve_point(args.n, _cone(args, "lambda_plus").q, _cone(args, "lambda_minus").q, args.c_minus)
        _emit(args, cio.json_text([{**c.to_dict(), "classification": classify_pair(c)} for c in pts]))
        return 0
    if cmd == ("spiral", "trace"):
        _need(args, "n")
        samples = np.linspace(args.c_min, args.c_max, args.samples)
        res = trace_curve(args.n, _cone(args, "lambda_plus").q, _cone(args, "lambda_minus").q, samples)
        _emit(args, cio.curve_csv(res.points))
        return 0
    if cmd == ("spiral", "shaky"):
        _need(args, "n")
        q = _cone(args, "lambda").q
        _emit(args, cio.json_text([s.to_dict() for s in find_shaky(args.n, q, q)]))
        return 0
    if cmd == ("spiral", "pyramid"):
        _need(args, "n", "base")
        k, _, d = args.base.partition("/")
        base = PyramidBase.star(int(k), int(d)) if d else PyramidBase.k_gon(int(k))
        pts = find_pyramid_realization(args.n, _cone(args, "lambda").q, base)
        _emit(args, cio.json_text([c.to_dict() for c in pts]))
        return 0
    if cmd == ("spiral", "tristable"):
        _need(args, "n")
        sols = tristable_search(args.n, _cone(args, "lambda_plus").q, _cone(args, "lambda_circ").q, _cone(args, "lambda_minus").q)
        _emit(args, cio.json_text([s.to_dict() for s in sols]))
        return 0
    if cmd == ("spiral", "mesh"):
        _need(args, "n", "c", "p")
        real = SpiralRealization(args.n, args.c, args.p, _cone(args, "lambda").q, args.scale)
        _emit(args, obj_text(build_spiral_mesh(real, args.vertices)))
        return 0
    if cmd == ("crosssection",):
        _need(args, "n", "c", "p")
        real = SpiralRealization(args.n, args.c, args.p, _cone(args, "lambda").q, args.scale)
        cs = cross_section_at_height(real, args.height) if args.height is not None else cross_section(real, 0.5 if args.alpha is None else args.alpha)
        out = {
            "alpha": cs.alpha,
            "h": cs.h,
            "area": cs.area,
            "area_ratio": cs.area / cs.h**2,
            "equivalent_cone_angle_deg": math.degrees(equivalent_cone_angle(real)),
            "polygon": cs.polygon,
        }
        _emit(args, cio.json_text(out))
        return 0
    if cmd == ("snappability", "antifrustum"):
        _need(args, "n")
        gammas = _rad(args, "gamma")
        rows = []
        for g in gammas:
            s = antifrustum_snappability(args.n, _rad(args, "lambda_plus"), g, args.mode)
            rows.append(cio.SweepRow(math.degrees(g), s.sigma, s.rho, s.h_s, s.converged))
        _emit(args, cio.sweep_csv(rows))
        return 0 if all(r.converged for r in rows) else 1
    if cmd == ("snappability", "spiral"):
        _need(args, "n", "c_minus")
        q = _cone(args, "lambda").q
        rows, full = [], []
        for cm in args.c_minus:
            pt, shaky = snap_branch_point(args.n, q, cm)
            s = spiral_snappability(pt.realizations(), args.mode, shaky)
            rows.append(cio.SweepRow(cm, s.sigma, s.r_s, math.degrees(s.lambda_s), s.converged))
            full.append({"c_minus": cm, "c_plus": pt.c_plus, "p": pt.p, **s.to_dict()})
        _emit(args, cio.sweep_csv(rows))
        if args.json:
            cio.write_text(args.json, cio.json_text(full))
        return 0 if all(r.converged for r in rows) else 1
    if cmd == ("verify", "theorem"):
        _need(args, "n", "id")
        rec = verify_theorem(args.id, args.n, _cone(args, "lambda").q)
        _emit(args, cio.json_text(rec.to_dict()))
        return 1 if rec.status == "fail" else 0
    if cmd == ("develop",):
        _need(args, "mesh", "out")
        pattern = develop(read_obj(args.mesh))
        write_pattern(pattern, args.out)
        return 0
    raise UsageError(f"unknown command {' '.join(cmd)}")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, reg = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            cmd = (args.command,) + ((args.action,) if getattr(args, "action", None) else ())
            args = _apply_config(args, reg[cmd], argv[len(cmd):])
            args.command, args.action = cmd[0], cmd[1] if len(cmd) > 1 else None
        return _run(args)
    except UsageError as exc:
        print(f"conefold: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"conefold: invalid input: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, OSError) as exc:
        print(f"conefold: failed: {exc}", file=sys.stderr)
        return 1
