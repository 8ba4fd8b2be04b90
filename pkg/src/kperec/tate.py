"""Tate's algorithm at the places of F_p(t), in every characteristic.

The finite-place routine works on v-integral models and uses the residue
field F_p[t]/(pi) for the root extractions; the infinite place is handled
by the substitution t -> 1/s followed by the finite-place routine at (s)
(the recorded transform for that place is therefore in the local
coordinate s = 1/t).

Multiplicity tests on the step-6 cubic use the universal discriminant
identities (valid in characteristics 2 and 3 as well); the coordinate
shears that kill a1 and a3 use exact field constants, so no lifting slack
enters there.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import (Place, Poly, RatFunc, poly_factor, valuation)
from .residue import ResidueField
from .curves import WeierstrassCurve, frobenius_twist


class TateError(AssertionError):
    """Internal inconsistency inside Tate's algorithm (never expected)."""


@dataclass(frozen=True)
class Transform:
    """Coordinate change x = u^2 x' + r, y = u^3 y' + u^2 s x' + w."""

    u: RatFunc
    r: RatFunc
    s: RatFunc
    w: RatFunc

    @staticmethod
    def identity(p):
        return Transform(RatFunc.one(p), RatFunc.zero(p), RatFunc.zero(p), RatFunc.zero(p))

    def apply(self, E):
        u, r, s, w = self.u, self.r, self.s, self.w
        a1, a2, a3, a4, a6 = E.a_invariants
        na1 = (a1 + 2 * s) / u
        na2 = (a2 - s * a1 + 3 * r - s * s) / u**2
        na3 = (a3 + r * a1 + 2 * w) / u**3
        na4 = (a4 - s * a3 + 2 * r * a2 - (w + r * s) * a1 + 3 * r * r - 2 * s * w) / u**4
        na6 = (a6 + r * a4 + r * r * a2 + r**3 - w * a3 - w * w - r * w * a1) / u**6
        return WeierstrassCurve(E.p, na1, na2, na3, na4, na6)

    def then(self, other):
        u1, r1, s1, w1 = self.u, self.r, self.s, self.w
        u2, r2, s2, w2 = other.u, other.r, other.s, other.w
        return Transform(u1 * u2,
                         r1 + u1 * u1 * r2,
                         s1 + u1 * s2,
                         w1 + u1 * u1 * s1 * r2 + u1**3 * w2)

    def to_json(self):
        return {"u": str(self.u), "r": str(self.r), "s": str(self.s), "w": str(self.w)}


@dataclass(frozen=True)
class ReductionData:
    """Per-place output of Tate's algorithm.

    For the infinite place the transform is expressed in the local
    coordinate s = 1/t (applied after substituting t -> 1/s).
    """

    place: Place
    kodaira: str
    v_min_disc: int
    reduction_class: str  # good | multiplicative | additive
    transform: Transform

    def to_json(self):
        return {"place": self.place.serialize(), "kodaira": self.kodaira,
                "v": self.v_min_disc, "class": self.reduction_class}


@dataclass(frozen=True)
class DiscriminantReport:
    degree: int
    semistable: bool
    places: tuple  # ReductionData for every bad place

    def to_json(self):
        return {"degree": self.degree, "semistable": self.semistable,
                "places": [rd.to_json() for rd in self.places]}


_KODAIRA_VDISC = {"I0": 0, "II": 2, "III": 3, "IV": 4,
                  "I0*": 6, "IV*": 8, "III*": 9, "II*": 10}


def _check_tame_vdisc(p, n, tame, label):
    """v(disc) equals the tame value for p >= 5; wild conductor contributions
    in residue characteristic 2 and 3 only ever push it higher."""
    if p >= 5 and n != tame:
        raise TateError(f"{label} must have v(disc) = {tame} when p >= 5")
    if n < tame:
        raise TateError(f"{label} cannot have v(disc) < {tame}")


def _tate_finite(E, pi):
    """Run Tate's algorithm at the finite place (pi); returns ReductionData."""
    p = E.p
    place = Place.finite(pi)
    k = ResidueField(pi)
    pi_r = RatFunc(pi)

    def val(f):
        return valuation(f, place)

    def red(f):
        return k.reduce(f)

    def lift(a):
        return k.lift(a)

    def ensure_integral(f):
        if val(f) < 0:
            raise TateError("expected a v-integral quantity")
        return f

    C = E
    total = Transform.identity(p)

    def shift(tr):
        nonlocal C, total
        C = tr.apply(C)
        total = total.then(tr)

    one, zero = RatFunc.one(p), RatFunc.zero(p)

    # integral model at pi
    mdl = 0
    for a, wt in zip(C.a_invariants, (1, 2, 3, 4, 6)):
        v = val(a)
        if v < 0:
            mdl = max(mdl, ((-v) + wt - 1) // wt)  # ceil(-v / weight)
    if mdl > 0:
        shift(Transform(one / pi_r**mdl, zero, zero, zero))

    while True:
        n = val(C.disc)
        if n == 0:
            return ReductionData(place, "I0", 0, "good", total)

        a1, a2, a3, a4, a6 = C.a_invariants

        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if val(C.b2) > 0:
                r = lift(red(a4).sqrt())
                w = lift(red(r**3 + a2 * r * r + a4 * r + a6).sqrt())
            else:
                inv = red(a1).inverse()
                r = lift(red(a3) * inv)
                w = lift((red(a4) + red(r) * red(r)) * inv)
        elif p == 3:
            if val(C.b2) > 0:
                r = lift(red(-C.b6).cbrt())
            else:
                r = lift(-red(C.b4) / red(C.b2))
            w = lift(red(a1 * r + a3))
        else:
            if val(C.c4) > 0:
                r = lift(-red(C.b2) / 12)
            else:
                r = lift(-(red(C.c6) + red(C.b2) * red(C.c4)) / (12 * red(C.c4)))
            w = lift(-(red(a1) * red(r) + red(a3)) / 2)
        shift(Transform(one, r, zero, w))
        a1, a2, a3, a4, a6 = C.a_invariants
        if min(val(a3), val(a4), val(a6)) < 1:
            raise TateError("singular point translation failed")

        if val(C.b2) == 0:
            return ReductionData(place, f"I{n}", n, "multiplicative", total)
        if val(a6) < 2:
            return ReductionData(place, "II", n, "additive", total)
        if val(C.b8) < 3:
            return ReductionData(place, "III", n, "additive", total)
        if val(C.b6) < 3:
            return ReductionData(place, "IV", n, "additive", total)

        # normalize so that pi | a1, a2; pi^2 | a3, a4; pi^3 | a6
        if p == 2:
            s = lift(red(a2).sqrt())
            w = pi_r * lift(red(ensure_integral(a6 / pi_r**2)).sqrt())
        else:
            half = RatFunc.const(p, pow(2, p - 2, p))
            s = -a1 * half
            w = -a3 * half
        shift(Transform(one, zero, s, w))
        a1, a2, a3, a4, a6 = C.a_invariants
        if val(a1) < 1 or val(a2) < 1 or val(a3) < 2 or val(a4) < 2 or val(a6) < 3:
            raise TateError("step 6 normalization failed")

        b = ensure_integral(a2 / pi_r)
        c = ensure_integral(a4 / pi_r**2)
        d = ensure_integral(a6 / pi_r**3)
        # multiple-root tests for T^3 + bT^2 + cT + d via universal identities
        w_cubic = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x_cubic = 3 * c - b * b

        if not red(w_cubic) == k.zero():
            _check_tame_vdisc(p, n, 6, "I0*")
            return ReductionData(place, "I0*", n, "additive", total)

        if not red(x_cubic) == k.zero():
            # double root: types I_m*
            if p == 2:
                rbar = red(c).sqrt()
            else:
                rbar = red(9 * d - b * c) / (red(b * b - 3 * c) * 2)
            shift(Transform(one, pi_r * lift(rbar), zero, zero))
            a1, a2, a3, a4, a6 = C.a_invariants
            if val(a2) != 1 or val(a4) < 3 or val(a6) < 4:
                raise TateError("double-root translation failed")
            m = 1
            mx, my = pi_r * pi_r, pi_r * pi_r
            while True:
                xa3 = ensure_integral(a3 / my)
                xa6 = ensure_integral(a6 / (mx * my))
                if not red(xa3 * xa3 + 4 * xa6) == k.zero():
                    break
                y0 = red(xa6).sqrt() if p == 2 else -red(xa3) / 2
                shift(Transform(one, zero, zero, my * lift(y0)))
                a1, a2, a3, a4, a6 = C.a_invariants
                m += 1
                my = my * pi_r
                xa2 = ensure_integral(a2 / pi_r)
                xa4 = ensure_integral(a4 / (pi_r * mx))
                xa6 = ensure_integral(a6 / (mx * my))
                if not red(xa4 * xa4 - 4 * xa2 * xa6) == k.zero():
                    break
                if p == 2:
                    x0 = (red(xa6) / red(xa2)).sqrt()
                else:
                    x0 = -red(xa4) / (red(xa2) * 2)
                shift(Transform(one, mx * lift(x0), zero, zero))
                a1, a2, a3, a4, a6 = C.a_invariants
                m += 1
                mx = mx * pi_r
            _check_tame_vdisc(p, n, 6 + m, f"I{m}*")
            return ReductionData(place, f"I{m}*", n, "additive", total)

        # triple root: types IV*, III*, II* or a non-minimal model
        rbar = red(-d).cbrt() if p == 3 else -red(b) / 3
        shift(Transform(one, pi_r * lift(rbar), zero, zero))
        a1, a2, a3, a4, a6 = C.a_invariants
        if val(a2) < 2 or val(a4) < 3 or val(a6) < 4:
            raise TateError("triple-root translation failed")

        xa3 = ensure_integral(a3 / pi_r**2)
        xa6 = ensure_integral(a6 / pi_r**4)
        if not red(xa3 * xa3 + 4 * xa6) == k.zero():
            _check_tame_vdisc(p, n, 8, "IV*")
            return ReductionData(place, "IV*", n, "additive", total)
        y0 = red(xa6).sqrt() if p == 2 else -red(xa3) / 2
        shift(Transform(one, zero, zero, pi_r * pi_r * lift(y0)))
        a1, a2, a3, a4, a6 = C.a_invariants
        if val(a3) < 3 or val(a6) < 5:
            raise TateError("IV* exit translation failed")

        if val(a4) < 4:
            _check_tame_vdisc(p, n, 9, "III*")
            return ReductionData(place, "III*", n, "additive", total)
        if val(a6) < 6:
            _check_tame_vdisc(p, n, 10, "II*")
            return ReductionData(place, "II*", n, "additive", total)

        # non-minimal: scale by pi and restart
        shift(Transform(pi_r, zero, zero, zero))


def _infinity_model(E):
    """E with t -> 1/s (the same symbol reused for s)."""
    return WeierstrassCurve(E.p, *(a.subs_inverse() for a in E.a_invariants))


def local_minimal_data(E, place):
    """Tate's algorithm at one place of K."""
    if place.is_infinite:
        data = _tate_finite(_infinity_model(E), Poly.t(E.p))
        return ReductionData(place, data.kodaira, data.v_min_disc,
                             data.reduction_class, data.transform)
    return _tate_finite(E, place.poly)


def _candidate_places(E):
    """Places that could be bad: divisors of disc or of any a_i denominator, plus infinity."""
    p = E.p
    polys = {}
    if not E.disc.num.is_constant():
        _, fs = poly_factor(E.disc.num)
        for irr, _ in fs:
            polys[irr] = None
    for a in E.a_invariants:
        if not a.den.is_one():
            _, fs = poly_factor(a.den)
            for irr, _ in fs:
                polys[irr] = None
    out = [Place.finite(f) for f in sorted(polys, key=lambda f: (f.degree, f.coeffs))]
    out.append(Place.infinite(p))
    return out


def discriminant_report(E):
    """Reduction data at every bad place, the degree of the minimal
    discriminant divisor, and semistability."""
    bad = []
    degree = 0
    semistable = True
    for v in _candidate_places(E):
        data = local_minimal_data(E, v)
        if data.v_min_disc > 0:
            bad.append(data)
            degree += v.residue_degree() * data.v_min_disc
            if data.reduction_class == "additive":
                semistable = False
    return DiscriminantReport(degree, semistable, tuple(bad))


def minimal_discriminant_degree(E):
    return discriminant_report(E).degree


def is_semistable(E):
    """(bool, list of additive places)."""
    report = discriminant_report(E)
    additive = [rd.place for rd in report.places if rd.reduction_class == "additive"]
    return (len(additive) == 0, additive)
