"""The Goldfeld-Szpiro survey and the isotrivial counterexample demo."""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, InputError, InvariantViolationError
from .fields import RatFunc, parse_ratfunc, format_ratfunc
from .curves import TowerPoint, WeierstrassCurve, frobenius_twist, is_isotrivial
from .heights import canonical_height, gs_floor, naive_height
from .tate import minimal_discriminant_degree
from .torsion import is_torsion_point
from .descent import bounded_height_points

CSV_COLUMNS = ("curve_id", "deg_disc", "min_canonical_height", "floor",
               "ratio", "points_searched")


def thread_count():
    raw = os.environ.get("KPEREC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SurveyRow:
    curve_id: str
    deg_disc: int | None
    min_canonical_height: Fraction | None
    floor: Fraction | None
    ratio: Fraction | None
    points_searched: int
    skipped: str | None = None   # reason, e.g. "isotrivial"
    budget_exhausted: bool = False

    def to_json(self):
        return {"curve_id": self.curve_id,
                "deg_disc": self.deg_disc,
                "min_canonical_height": _opt_str(self.min_canonical_height),
                "floor": _opt_str(self.floor),
                "ratio": _opt_str(self.ratio),
                "points_searched": self.points_searched,
                "skipped": self.skipped,
                "budget_exhausted": self.budget_exhausted}

    def to_csv_fields(self):
        return (self.curve_id, _opt_str(self.deg_disc),
                _opt_str(self.min_canonical_height), _opt_str(self.floor),
                _opt_str(self.ratio), str(self.points_searched))


def _opt_str(v):
    return "" if v is None else str(v)


def family_from_spec(spec):
    """Expand a coefficient-grid family spec into curves.

    Expected form: {"p": 5, "a4": ["0","1"], "a6": ["t","t+1"]} (any of the
    five coefficient slots may carry a list; singular combinations are
    dropped).
    """
    if "p" not in spec:
        raise InputError("family spec needs a prime p")
    p = int(spec["p"])
    slots = []
    for name in ("a1", "a2", "a3", "a4", "a6"):
        vals = spec.get(name, ["0"])
        if isinstance(vals, str):
            vals = [vals]
        slots.append([parse_ratfunc(p, str(v)) for v in vals])
    curves = []
    from itertools import product
    for combo in product(*slots):
        try:
            curves.append(WeierstrassCurve(p, *combo))
        except ValueError:
            continue  # singular grid member
    return curves


def survey_curve(E, search_bound, eps, budget=2_000_000):
    """One survey row; raises InvariantViolationError on a floor violation."""
    if is_isotrivial(E):
        return SurveyRow(E.curve_id(), None, None, None, None, 0,
                         skipped="isotrivial")
    deg = minimal_discriminant_degree(E)
    floor = gs_floor(E)
    try:
        pts = bounded_height_points(E, 0, search_bound, budget)
    except BudgetExceededError:
        return SurveyRow(E.curve_id(), deg, None, floor, None, 0,
                         budget_exhausted=True)
    best = None
    searched = 0
    for P in pts:
        if P.is_infinity:
            continue
        searched += 1
        value, err = canonical_height(P, eps)
        if value - err <= 0:
            if is_torsion_point(P):
                continue
            raise InvariantViolationError(
                f"point {P!r} is neither certified positive nor torsion; shrink eps")
        if value - err < floor:
            raise InvariantViolationError(
                f"Goldfeld-Szpiro violation on {E.curve_id()}: "
                f"hhat = {value} +/- {err} < floor {floor}")
        if best is None or value < best:
            best = value
    ratio = None if best is None else best / floor
    return SurveyRow(E.curve_id(), deg, best, floor, ratio, searched)


def gs_survey(curves, search_bound, eps, budget=2_000_000, threads=None):
    """Survey rows for a family; returns (rows, any_budget_exhausted)."""
    threads = threads or thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(
                lambda E: survey_curve(E, search_bound, eps, budget), curves))
    else:
        rows = [survey_curve(E, search_bound, eps, budget) for E in curves]
    return rows, any(r.budget_exhausted for r in rows)


def rows_to_csv(rows):
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(_csv_escape(f) for f in r.to_csv_fields()) + "\n")
    return buf.getvalue()


def _csv_escape(s):
    if any(c in s for c in ",\"\n"):
        return '"' + s.replace('"', '""') + '"'
    return s


# ---------------------------------------------------------------------------
# the isotrivial counterexample
# ---------------------------------------------------------------------------

def isotrivial_demo_curve(p):
    """Y^2 = X^3 + (t^3 + t)^2 X over F_p: isotrivial, j = 1728."""
    d = parse_ratfunc(p, "t^3+t")
    return WeierstrassCurve(p, 0, 0, 0, d * d, 0), d


def isotrivial_family_point(E, d, n):
    """The level-n member: twist representative (t * d^(p^n), d^((3 p^n + 1)/2))."""
    p = E.p
    q = p**n
    x = RatFunc.t(p) * d**q
    y = d ** ((3 * q + 1) // 2)
    return TowerPoint(E, n, (x, y))


def demo_isotrivial(p, max_level, eps=Fraction(1, 10**6), max_degree=None):
    """Verify the height-shrinking family on the isotrivial quadratic twist.

    For n = 0..max_level: the closed-form point P_n lies on the level-n
    twist, is level-minimal (strict growth of E(K^{1/p^n})), and satisfies
    hhat(P_n) = hhat(P_0)/p^n within certified error: no positive floor can
    hold, which is the failure of the descent lemma's positivity property
    for isotrivial curves.
    """
    if p == 2:
        raise InputError(
            "the demo family needs p > 2 (a char-2 analogue exists but is out "
            "of scope; see the command help)")
    if max_level < 0:
        raise InputError("max_level must be nonnegative")
    E, d = isotrivial_demo_curve(p)
    if not is_isotrivial(E):
        raise InvariantViolationError("demo curve must be isotrivial")
    eps = Fraction(eps)
    kwargs = {} if max_degree is None else {"max_degree": max_degree}
    rows = []
    base_value = None
    base_err = None
    for n in range(max_level + 1):
        P = isotrivial_family_point(E, d, n)
        if P.level != n:
            raise InvariantViolationError(
                f"family point unexpectedly normalized below level {n}")
        value, err = canonical_height(P, eps, **kwargs)
        if n == 0:
            base_value, base_err = value, err
        expected = base_value / p**n
        gap = abs(value - expected)
        tol = err + base_err / p**n
        if gap > tol:
            raise InvariantViolationError(
                f"height scaling failed at level {n}: |{value} - {expected}| > {tol}")
        rows.append({"level": n,
                     "x": format_ratfunc(P.x),
                     "naive": str(naive_height(P)),
                     "canonical": str(value),
                     "error": str(err),
                     "expected": str(expected)})
    return {"curve": E.to_json(),
            "isotrivial": True,
            "j": format_ratfunc(E.j),
            "family": rows,
            "note": ("canonical heights shrink by 1/p per level: no positive "
                     "lower bound holds on the perfect closure")}
