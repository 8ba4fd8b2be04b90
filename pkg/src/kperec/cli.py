"""Command-line front end.

Subcommands: invariants, disc, height, canheight, torsion, enumerate,
descend, gs-check, gs-survey, demo-isotrivial.  Output is deterministic
JSON (sorted keys) or a small human-readable rendering; exit codes are
0 success, 1 input error, 2 budget exhaustion, 3 internal invariant
violation.  KPEREC_THREADS caps survey parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import BudgetExceededError, InputError, InvariantViolationError
from .fields import ParseError, format_ratfunc, parse_ratfunc
from .heights import DEFAULT_MAX_DEGREE
from .curves import TowerPoint, WeierstrassCurve, frobenius_twist
from .tate import discriminant_report
from .heights import (canonical_height, gs_floor, height_report,
                      lehmer_certificate, naive_height)
from .torsion import torsion_subgroup, torsion_perfect_closure
from .descent import (DescentResult, IntegerLattice, bounded_height_points,
                      descend, perfect_closure_generators)
from . import survey as survey_mod

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_INVARIANT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _load_curve(args):
    if not args.curve:
        raise InputError("--curve is required")
    try:
        obj = json.loads(args.curve)
    except json.JSONDecodeError as exc:
        raise InputError(f"curve JSON invalid: {exc}") from exc
    p = args.p if args.p else obj.get("p")
    if p is None:
        raise InputError("prime p missing (use --p or put it in the curve JSON)")
    return WeierstrassCurve.from_json({"p": int(p), "a": obj.get("a", obj.get("ainvs"))})


def _load_point(curve, raw):
    if not raw:
        raise InputError("--point is required")
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"point JSON invalid: {exc}") from exc
    return TowerPoint.from_json(curve, obj)


def _fraction(s, name):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{name} must be a rational number: {s!r}") from exc


def _emit(args, payload, text=None):
    if args.json or text is None:
        out = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        out = text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def cmd_invariants(args):
    E = _load_curve(args)
    payload = {"curve": E.to_json(),
               "b": [format_ratfunc(b) for b in (E.b2, E.b4, E.b6, E.b8)],
               "c": [format_ratfunc(c) for c in (E.c4, E.c6)],
               "disc": format_ratfunc(E.disc),
               "j": format_ratfunc(E.j),
               "isotrivial": E.is_isotrivial()}
    lines = [f"curve: {E.curve_id()}",
             f"disc = {payload['disc']}",
             f"j = {payload['j']}",
             f"isotrivial: {payload['isotrivial']}"]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_disc(args):
    E = _load_curve(args)
    report = discriminant_report(E)
    payload = report.to_json()
    lines = [f"deg(min disc) = {report.degree}", f"semistable: {report.semistable}"]
    lines += [f"  {rd.place}: {rd.kodaira} (v = {rd.v_min_disc}, {rd.reduction_class})"
              for rd in report.places]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_height(args):
    E = _load_curve(args)
    P = _load_point(E, args.point)
    payload = {"naive": str(naive_height(P)), "level": P.level}
    _emit(args, payload, f"naive height = {payload['naive']} (level {P.level})\n")
    return EXIT_OK


def cmd_canheight(args):
    E = _load_curve(args)
    P = _load_point(E, args.point)
    eps = _fraction(args.epsilon, "epsilon")
    rpt = height_report(P, eps, max_degree=args.budget or DEFAULT_MAX_DEGREE)
    payload = rpt.to_json()
    _emit(args, payload,
          f"canonical height = {rpt.canonical_value} +/- {rpt.canonical_error}\n")
    return EXIT_OK


def cmd_torsion(args):
    E = _load_curve(args)
    if args.max_level > 0:
        group = torsion_perfect_closure(E, args.max_level)
    else:
        group = torsion_subgroup(E)
    payload = group.to_json()
    if "stabilized_at" not in payload:
        payload["stabilized_at"] = 0
    structure = payload["structure"] or "trivial"
    _emit(args, payload, f"torsion structure: {structure}\n")
    return EXIT_OK


def cmd_enumerate(args):
    E = _load_curve(args)
    bound = _fraction(args.bound, "bound")
    pts = bounded_height_points(E, args.level, bound, args.budget or 2_000_000)
    payload = {"level": args.level, "bound": str(bound),
               "count": len(pts), "points": [P.to_json() for P in pts]}
    lines = [f"{len(pts)} points with naive height <= {bound} at level {args.level}"]
    lines += ["  " + json.dumps(P.to_json(), sort_keys=True) for P in pts]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_descend(args):
    E = _load_curve(args)
    bound = _fraction(args.search_bound, "search-bound")
    eps = _fraction(args.epsilon, "epsilon")
    report = perfect_closure_generators(E, args.max_level, bound, eps=eps,
                                        budget=args.budget or 2_000_000)
    payload = report.to_json()
    lines = [f"rank sequence: {list(report.rank_sequence)}",
             f"stabilized_at: {report.stabilized_at}"]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gs_check(args):
    E = _load_curve(args)
    P = _load_point(E, args.point)
    eps = _fraction(args.epsilon, "epsilon")
    cert = lehmer_certificate(E, P, eps, max_degree=args.budget or DEFAULT_MAX_DEGREE)
    payload = cert.to_json()
    text = f"verdict: {cert.verdict}"
    if cert.ratio is not None:
        text += f" (ratio = {cert.ratio})"
    _emit(args, payload, text + "\n")
    return EXIT_OK


def cmd_gs_survey(args):
    if not args.family:
        raise InputError("--family is required (JSON grid spec)")
    try:
        spec = json.loads(args.family)
    except json.JSONDecodeError as exc:
        raise InputError(f"family JSON invalid: {exc}") from exc
    curves = survey_mod.family_from_spec(spec)
    eps = _fraction(args.epsilon, "epsilon")
    bound = _fraction(args.search_bound, "search-bound")
    rows, exhausted = survey_mod.gs_survey(curves, bound, eps,
                                           budget=args.budget or 2_000_000)
    payload = {"rows": [r.to_json() for r in rows],
               "family_size": len(curves),
               "budget_exhausted": exhausted}
    csv_text = survey_mod.rows_to_csv(rows)
    if args.csv_out:
        with open(args.csv_out, "w") as fh:
            fh.write(csv_text)
    _emit(args, payload, csv_text)
    return EXIT_BUDGET if exhausted else EXIT_OK


def cmd_demo_isotrivial(args):
    eps = _fraction(args.epsilon, "epsilon")
    payload = survey_mod.demo_isotrivial(args.p or 5, args.max_level, eps,
                                         max_degree=args.budget or DEFAULT_MAX_DEGREE)
    lines = [f"curve: Y^2 = X^3 + (t^3+t)^2 X over F_{args.p or 5} "
             f"(isotrivial, j = {payload['j']})"]
    lines.append("level | naive height | canonical height (certified)")
    for row in payload["family"]:
        lines.append(f"  {row['level']}   | {row['naive']:>12} | "
                     f"{row['canonical']} +/- {row['error']}")
    lines.append(payload["note"])
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def _add_common(sp, point=False, need_curve=True):
    sp.add_argument("--p", type=int, default=None, help="characteristic")
    if need_curve:
        sp.add_argument("--curve", help='curve JSON, e.g. {"p":5,"a":["0","0","0","1","t"]}')
    if point:
        sp.add_argument("--point", help='point JSON {"level":0,"x":"...","y":"..."} or {"infinity":true}')
    sp.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sp.add_argument("--out", help="write output to FILE")
    sp.add_argument("--budget", type=int, default=None,
                    help="resource cap (enumeration candidates, or polynomial "
                         "degree for height computations)")


def build_parser():
    ap = _Parser(prog="kperec",
                 description="Exact arithmetic for elliptic curves over F_p(t) "
                             "and its perfect closure")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("invariants", help="b/c invariants, disc, j, isotriviality")
    _add_common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("disc", help="Tate reduction data and deg(min disc)")
    _add_common(sp)
    sp.set_defaults(func=cmd_disc)

    sp = sub.add_parser("height", help="naive height of a point")
    _add_common(sp, point=True)
    sp.set_defaults(func=cmd_height)

    sp = sub.add_parser("canheight", help="canonical height with certified error")
    _add_common(sp, point=True)
    sp.add_argument("--epsilon", default="1/1000000", help="requested error bound")
    sp.set_defaults(func=cmd_canheight)

    sp = sub.add_parser("torsion", help="torsion subgroup (over K or tower levels)")
    _add_common(sp)
    sp.add_argument("--max-level", type=int, default=0)
    sp.set_defaults(func=cmd_torsion)

    sp = sub.add_parser("enumerate", help="all points of bounded naive height")
    _add_common(sp)
    sp.add_argument("--level", type=int, default=0)
    sp.add_argument("--bound", default="1", help="naive height bound (rational)")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("descend", help="generators per tower level with stabilization")
    _add_common(sp)
    sp.add_argument("--max-level", type=int, default=1)
    sp.add_argument("--search-bound", default="1")
    sp.add_argument("--epsilon", default="1/10000")
    sp.set_defaults(func=cmd_descend)

    sp = sub.add_parser("gs-check", help="Goldfeld-Szpiro floor certificate for a point")
    _add_common(sp, point=True)
    sp.add_argument("--epsilon", default="1/1000000")
    sp.set_defaults(func=cmd_gs_check)

    sp = sub.add_parser("gs-survey", help="floor survey over a coefficient grid")
    _add_common(sp, need_curve=False)
    sp.add_argument("--family", help='grid JSON, e.g. {"p":5,"a4":["0","1"],"a6":["t"]}')
    sp.add_argument("--search-bound", default="1")
    sp.add_argument("--epsilon", default="1/10000")
    sp.add_argument("--csv-out", help="also write the CSV table to FILE")
    sp.set_defaults(func=cmd_gs_survey)

    sp = sub.add_parser(
        "demo-isotrivial",
        help="height-shrinking family on Y^2 = X^3 + (t^3+t)^2 X (requires p > 2; "
             "the paper-remarked p = 2 analogue is out of scope)")
    _add_common(sp, need_curve=False)
    sp.add_argument("--max-level", type=int, default=2)
    sp.add_argument("--epsilon", default="1/1000000")
    sp.set_defaults(func=cmd_demo_isotrivial)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except (InputError, ParseError, ValueError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except BudgetExceededError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except InvariantViolationError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
