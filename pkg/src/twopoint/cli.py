"""Batch command-line front end.

Exit codes: 0 = inequality holds / check passed, 2 = inequality violated,
3 = geometric hypothesis violated (the report is still written),
1 = usage or runtime error (a JSON error object goes to stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import capacity as cap
from . import covering as cov
from . import inequalities as ineq
from . import report as rep
from .curves import DeltaCurve, delta_trace
from .diskgeom import HalfDisk, HalfPlane, UnitDisk
from .errors import TwoPointError
from .rational import RationalMap

DEFAULT_SEED = 20240809
SEED_ENV = "TWOPOINT_SEED"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_HYPOTHESIS = 3


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    tolerance: float = 1e-10
    json_path: str | None = None
    csv_path: str | None = None
    svg_path: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


class CliError(Exception):
    pass


def parse_complex(text: str) -> complex:
    if text is None:
        raise CliError("missing point argument (--z1/--z2)")
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise CliError(f"cannot parse complex number {text!r}") from exc


def _load_map(args) -> RationalMap:
    if getattr(args, "extremal_lambda", None) is not None:
        lam = args.extremal_lambda
        if args.command == "goluzin":
            w1 = parse_complex(args.w1) if args.w1 else -1.0
            w2 = parse_complex(args.w2) if args.w2 else 1.0
            return ineq.goluzin_extremal_map(lam, w1, w2)
        return ineq.extremal_schwarzian_map(lam)
    if getattr(args, "map_json", None):
        return RationalMap.from_json_dict(json.loads(args.map_json))
    if getattr(args, "map", None):
        with open(args.map, "r", encoding="utf-8") as fh:
            return RationalMap.from_json_dict(json.load(fh))
    raise CliError("one of --map, --map-json, --extremal-lambda is required")


_DOMAINS = {
    "disk": UnitDisk,
    "halfdisk-left": lambda: HalfDisk("left"),
    "halfdisk-right": lambda: HalfDisk("right"),
    "halfplane-left": lambda: HalfPlane(1.0, 0.0),
    "halfplane-right": lambda: HalfPlane(-1.0, 0.0),
}


def _emit(results, args, default_stream=True) -> None:
    wrote = False
    if getattr(args, "json", None):
        rep.emit_report(results, "json", args.json)
        wrote = True
    if getattr(args, "csv", None):
        rep.emit_report(results, "csv", args.csv)
        wrote = True
    if default_stream and not wrote:
        sys.stdout.write(rep.emit_report(results, "json"))


def _bound_exit(report, tol: float) -> int:
    if report.hypothesis == ineq.HYP_VIOLATED:
        return EXIT_HYPOTHESIS
    return EXIT_OK if report.slack >= -tol else EXIT_VIOLATED


def _cmd_goluzin(args) -> int:
    rmap = _load_map(args)
    if args.extremal_lambda is not None and args.z1 is None:
        args.z1, args.z2 = str(-args.extremal_lambda), str(args.extremal_lambda)
    report = ineq.goluzin_report(
        rmap, parse_complex(args.z1), parse_complex(args.z2), check=args.check
    )
    _emit([report], args)
    return _bound_exit(report, args.tol)


def _cmd_schwarzian(args) -> int:
    rmap = _load_map(args)
    if args.extremal_lambda is not None and args.z1 is None:
        args.z1, args.z2 = str(-args.extremal_lambda), str(args.extremal_lambda)
    report = ineq.schwarzian_report(
        rmap, parse_complex(args.z1), parse_complex(args.z2), check=args.check
    )
    _emit([report], args)
    return _bound_exit(report, args.tol)


def _cmd_covering(args) -> int:
    rmap = _load_map(args)
    z1, z2 = parse_complex(args.z1), parse_complex(args.z2)
    checks = {"gamma": [cov.check_gamma_covering],
              "delta": [cov.check_delta_covering],
              "both": [cov.check_gamma_covering, cov.check_delta_covering]}
    verdicts = [fn(rmap, z1, z2, args.curve_samples, args.family_samples)
                for fn in checks[args.family]]
    _emit(verdicts, args)
    return EXIT_OK if all(v.ok for v in verdicts) else EXIT_HYPOTHESIS


def _parse_plates(text: str):
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    else:
        spec = json.loads(text)
    plates = []
    for row in spec:
        cx, cy, r, delta = row
        plates.append(cap.Plate(complex(cx, cy), float(r), float(delta)))
    return plates


def _cmd_capacity(args) -> int:
    domain = _DOMAINS[args.domain]()
    cond = cap.Condenser(domain, _parse_plates(args.plates))
    if args.method == "charges":
        est = cap.solve_condenser_charges(cond)
        _emit([est], args)
        return EXIT_OK
    if args.svg or args.field_bin:
        est, field2d, box = cap.solve_condenser_field(cond, args.grid)
        if args.field_bin:
            cap.write_field_binary(args.field_bin, field2d)
        if args.svg:
            theta = np.linspace(0, 2 * math.pi, 257)
            scene = rep.SvgScene(
                curves=[], points=[p.center for p in cond.plates],
                outline=np.exp(1j * theta) if isinstance(domain, UnitDisk) else None,
                field_values=field2d, field_box=tuple(box),
            )
            rep.emit_svg(scene, args.svg)
    else:
        est = cap.solve_condenser(cond, args.grid, richardson=args.richardson)
    _emit([est], args)
    return EXIT_OK


def _cmd_extremal(args) -> int:
    if args.kind == "schwarzian":
        rmap = ineq.extremal_schwarzian_map(args.lam)
        report = ineq.schwarzian_report(rmap, -args.lam, args.lam)
    else:
        w1 = parse_complex(args.w1) if args.w1 else -1.0
        w2 = parse_complex(args.w2) if args.w2 else 1.0
        rmap = ineq.goluzin_extremal_map(args.lam, w1, w2)
        report = ineq.goluzin_report(rmap, -args.lam, args.lam)
    if args.map_out:
        with open(args.map_out, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json_text(rmap.to_json_dict()) + "\n")
    if args.svg:
        theta = np.linspace(0, 2 * math.pi, 1025)[:-1]
        boundary = rmap(0.999999 * np.exp(1j * theta))
        curves = [boundary]
        for t in (0.5, 1.0, 2.0, -0.5, -1.0, -2.0):
            w1 = complex(rmap(-args.lam))
            w2 = complex(rmap(args.lam))
            for branch in ("plus", "minus"):
                curves.append(delta_trace(DeltaCurve(w1, w2, t, branch), 257))
        scene = rep.SvgScene(curves=curves,
                             points=[rmap(-args.lam), rmap(args.lam)])
        rep.emit_svg(scene, args.svg)
    _emit([report], args)
    return _bound_exit(report, args.tol)


def _cmd_scan(args) -> int:
    lams = [float(t) for t in args.lambdas.split(",")]
    reports = []
    for lam in lams:
        if args.kind == "schwarzian":
            rmap = ineq.extremal_schwarzian_map(lam)
            r = ineq.schwarzian_report(rmap, -lam, lam)
        else:
            rmap = ineq.goluzin_extremal_map(lam, -1.0, 1.0)
            r = ineq.goluzin_report(rmap, -lam, lam)
        r.inputs["lambda"] = lam
        reports.append(r)
    _emit(reports, args)
    worst = min(r.slack for r in reports)
    return EXIT_OK if worst >= -args.tol else EXIT_VIOLATED


def build_parser() -> _Parser:
    p = _Parser(prog="twopoint",
                description="two-point distortion bounds for rational maps "
                            "on the unit disk")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_map=True, with_points=True):
        if with_map:
            sp.add_argument("--map", help="path to a map spec JSON file")
            sp.add_argument("--map-json", help="inline map spec JSON")
            sp.add_argument("--extremal-lambda", type=float, default=None)
            sp.add_argument("--w1", default=None)
            sp.add_argument("--w2", default=None)
        if with_points:
            sp.add_argument("--z1", default=None)
            sp.add_argument("--z2", default=None)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--seed", type=int,
                        default=int(os.environ.get(SEED_ENV, DEFAULT_SEED)))
        sp.add_argument("--json", help="write the JSON report here")
        sp.add_argument("--csv", help="write the CSV report here")

    sp = sub.add_parser("goluzin", help="derivative-product bound report")
    common(sp)
    sp.add_argument("--check", action=argparse.BooleanOptionalAction,
                    default=False)

    sp = sub.add_parser("schwarzian", help="two-point Schwarzian bound report")
    common(sp)
    sp.add_argument("--check", action=argparse.BooleanOptionalAction,
                    default=False)

    sp = sub.add_parser("covering", help="univalent-covering hypothesis check")
    common(sp)
    sp.add_argument("--family", choices=("gamma", "delta", "both"),
                    default="both")
    sp.add_argument("--curve-samples", type=int,
                    default=cov.DEFAULT_CURVE_SAMPLES)
    sp.add_argument("--family-samples", type=int,
                    default=cov.DEFAULT_FAMILY_SAMPLES)

    sp = sub.add_parser("capacity", help="condenser capacity")
    common(sp, with_map=False, with_points=False)
    sp.add_argument("--domain", choices=sorted(_DOMAINS), default="disk")
    sp.add_argument("--plates", required=True,
                    help="JSON [[cx,cy,radius,potential],...] or @file")
    sp.add_argument("--grid", type=int, default=1024)
    sp.add_argument("--richardson", action="store_true")
    sp.add_argument("--method", choices=("fd", "charges"), default="fd")
    sp.add_argument("--svg", help="write a potential-field SVG here")
    sp.add_argument("--field-bin", help="write the raw field grid here")

    sp = sub.add_parser("extremal", help="construct an equality-case map")
    common(sp, with_map=False, with_points=False)
    sp.add_argument("--kind", choices=("schwarzian", "goluzin"),
                    default="schwarzian")
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--w1", default=None)
    sp.add_argument("--w2", default=None)
    sp.add_argument("--map-out", help="write the map spec JSON here")
    sp.add_argument("--svg", help="write boundary/curve SVG here")

    sp = sub.add_parser("scan", help="slack scan over a lambda grid")
    common(sp, with_map=False, with_points=False)
    sp.add_argument("--kind", choices=("schwarzian", "goluzin"),
                    default="schwarzian")
    sp.add_argument("--lambdas", required=True,
                    help="comma-separated lambda values")

    return p


_COMMANDS = {
    "goluzin": _cmd_goluzin,
    "schwarzian": _cmd_schwarzian,
    "covering": _cmd_covering,
    "capacity": _cmd_capacity,
    "extremal": _cmd_extremal,
    "scan": _cmd_scan,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except CliError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return EXIT_ERROR
    except (TwoPointError, OSError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
