"""Naive and canonical heights with certified error bounds.

The canonical height is the doubling limit (1/2) lim h(2^m P)/4^m,
evaluated on the level-n twist representative so all arithmetic stays in
F_p[t].  Convergence is certified through a two-sided duplication bound

    -c_low <= h(2P) - 4 h(P) <= c_up        for every P,

derived from the coefficients of the duplication forms and their
resultant: inertia cofactors G1*N + G2*D = rho * u^7 (and the w-side
analogue) are solved for exactly and verified symbolically, so the bound
constants are proved by construction.  Telescoping gives

    hhat in  A_m/2 + [-c_low, c_up] / (6 * 4^m),   A_m = h(2^m P)/4^m,

and the returned (value, error) is the midpoint/radius of that interval.
All heights are exact rationals; no floating point is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import fastpoly
from .errors import BudgetExceededError, EpsTooCoarseError, InvariantViolationError
from .fields import (Poly, RatFunc, func_height, func_height_via_places,
                     poly_factor, poly_ord)
from .tate import minimal_discriminant_degree

DEFAULT_MAX_DEGREE = 24_000_000
DEFAULT_MAX_DOUBLINGS = 64


def naive_height(P):
    """h_K(P): pole degree of x on the twist representative, over p^level."""
    if P.is_infinity:
        return Fraction(0)
    return Fraction(func_height(P.x), P.curve.p**P.level)


def naive_height_via_places(P):
    """The defining sum over places (cross-check path for naive_height)."""
    if P.is_infinity:
        return Fraction(0)
    return Fraction(func_height_via_places(P.x), P.curve.p**P.level)


# ---------------------------------------------------------------------------
# duplication forms and the certified bound
# ---------------------------------------------------------------------------

def _duplication_form_coeffs(E):
    """Denominator-cleared coefficients of the duplication forms.

    x(2P) = N(u, w) / D(u, w) for x = u/w, with
    N = delta*(X^4 - b4 X^2 - 2 b6 X - b8) and D = delta*(4X^3 + b2 X^2
    + 2 b4 X + b6) homogenized to degree 4; coefficients indexed by the
    power of u.
    """
    p = E.p
    delta = Poly.one(p)
    for b in (E.b2, E.b4, E.b6, E.b8):
        g = b.den.gcd(delta)
        delta = delta * (b.den // g)
    dl = RatFunc(delta)
    n_c = [dl * (-E.b8), dl * (-2 * E.b6), dl * (-E.b4), RatFunc.zero(p), dl]
    d_c = [dl * E.b6, dl * (2 * E.b4), dl * E.b2, dl * 4, RatFunc.zero(p)]
    for c in n_c + d_c:
        assert c.is_polynomial()
    return [c.num for c in n_c], [c.num for c in d_c]


def _bareiss_det(rows, p):
    n = len(rows)
    M = [row[:] for row in rows]
    sign = 1
    prev = Poly.one(p)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(p)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                q, r = num.divmod(prev)
                assert r.is_zero(), "Bareiss division must be exact"
                M[i][j] = q
            M[i][k] = Poly.zero(p)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign == 1 else -det


def _solve_linear(A, rhss, p):
    """Gaussian elimination over K; A is n x n of RatFunc, rhss a list of columns."""
    n = len(A)
    m = [row[:] + [col[i] for col in rhss] for i, row in enumerate(A)]
    width = n + len(rhss)
    for k in range(n):
        piv = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
        if piv is None:
            raise InvariantViolationError("singular system for inertia cofactors")
        m[k], m[piv] = m[piv], m[k]
        inv = RatFunc.one(p) / m[k][k]
        m[k] = [e * inv for e in m[k]]
        for i in range(n):
            if i != k and not m[i][k].is_zero():
                f = m[i][k]
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return [[m[i][n + j] for i in range(n)] for j in range(len(rhss))]


@dataclass(frozen=True)
class DuplicationBound:
    """Certified constants with -c_low <= h(2P) - 4h(P) <= c_up."""

    curve: object
    c_up: int
    c_low: int
    n_coeffs: tuple     # Poly, by power of u
    d_coeffs: tuple
    rho: Poly
    strip_primes: tuple  # monic irreducible divisors of rho

    def bound(self):
        return Fraction(max(self.c_up, self.c_low))

    def x_after_doubling(self, x):
        """x(2P) from x(P) via the forms; None when x is a 2-torsion abscissa."""
        u, w = x.num, x.den
        pows = [w**4, u * w**3, u * u * w * w, u**3 * w, u**4]
        num = Poly.zero(x.p)
        den = Poly.zero(x.p)
        for i in range(5):
            num = num + self.n_coeffs[i] * pows[i]
            den = den + self.d_coeffs[i] * pows[i]
        if den.is_zero():
            return None
        return RatFunc(num, den)


def _form_convolve(a_coeffs, b_coeffs, p):
    out = [RatFunc.zero(p)] * (len(a_coeffs) + len(b_coeffs) - 1)
    for i, a in enumerate(a_coeffs):
        if not a.is_zero():
            for j, b in enumerate(b_coeffs):
                out[i + j] = out[i + j] + a * b
    return out


@lru_cache(maxsize=256)
def _duplication_bound(E):
    p = E.p
    n_c, d_c = _duplication_form_coeffs(E)

    # resultant of the two degree-4 forms (Sylvester determinant, exact)
    zero = Poly.zero(p)
    rows = []
    for s in range(4):
        rows.append([zero] * s + list(reversed(n_c)) + [zero] * (3 - s))
    for s in range(4):
        rows.append([zero] * s + list(reversed(d_c)) + [zero] * (3 - s))
    rho = _bareiss_det(rows, p)
    if rho.is_zero():
        raise InvariantViolationError("duplication forms share a root; disc = 0?")

    # inertia cofactors: columns p1_0..p1_3, p2_0..p2_3; row k is the
    # coefficient of u^k w^(7-k) in P1*N + P2*D
    A = [[RatFunc.zero(p)] * 8 for _ in range(8)]
    for k in range(8):
        for i in range(4):
            if 0 <= k - i <= 4:
                A[k][i] = RatFunc(n_c[k - i])
                A[k][4 + i] = RatFunc(d_c[k - i])
    rho_r = RatFunc(rho)
    rhs_u = [RatFunc.zero(p)] * 7 + [rho_r]
    rhs_w = [rho_r] + [RatFunc.zero(p)] * 7
    sol_u, sol_w = _solve_linear(A, [rhs_u, rhs_w], p)

    n_cr = [RatFunc(c) for c in n_c]
    d_cr = [RatFunc(c) for c in d_c]
    for sol, rhs in ((sol_u, rhs_u), (sol_w, rhs_w)):
        lhs = _form_convolve(sol[:4], n_cr, p)
        for i, v in enumerate(_form_convolve(sol[4:], d_cr, p)):
            lhs[i] = lhs[i] + v
        if lhs != rhs:
            raise InvariantViolationError("inertia cofactor identity failed")

    # c_up: pole mass of the form coefficients (polynomials: only infinity)
    h_c = max(c.degree for c in n_c + d_c if not c.is_zero())
    c_up = int(h_c)

    # c_low: sum over rho's primes and infinity of the certified local loss
    all_coeffs_u = sol_u
    all_coeffs_w = sol_w
    _, rho_factors = poly_factor(rho)
    c_low = 0
    for pi, e in rho_factors:
        kap_u = min(_kval(c, pi) for c in all_coeffs_u)
        kap_w = min(_kval(c, pi) for c in all_coeffs_w)
        c_low += pi.degree * max(0, e - min(kap_u, kap_w))
    deg_u = max(_kdeg(c) for c in all_coeffs_u)
    deg_w = max(_kdeg(c) for c in all_coeffs_w)
    c_low += max(0, max(deg_u, deg_w) - rho.degree)

    primes = tuple(pi for pi, _ in rho_factors)
    return DuplicationBound(E, c_up, int(c_low), tuple(n_c), tuple(d_c), rho, primes)


def _kval(c, pi):
    if c.is_zero():
        return 10**9
    return poly_ord(c.num, pi) - poly_ord(c.den, pi)


def _kdeg(c):
    if c.is_zero():
        return -(10**9)
    return c.num.degree - c.den.degree


def duplication_height_bound(E):
    """A proven C with |h(2P) - 4h(P)| <= C for every P (exact Fraction)."""
    return _duplication_bound(E).bound()


# ---------------------------------------------------------------------------
# canonical height by certified doubling
# ---------------------------------------------------------------------------

def canonical_height(P, eps, max_degree=DEFAULT_MAX_DEGREE,
                     max_doublings=DEFAULT_MAX_DOUBLINGS):
    """(value, error_bound) with |hhat(P) - value| <= error_bound <= eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    zero = Fraction(0)
    if P.is_infinity:
        return zero, zero

    E = P.curve
    p = E.p
    n = P.level
    pn = p**n
    bnd = _duplication_bound(E)
    c_up, c_low = bnd.c_up, bnd.c_low
    spread = c_up + c_low

    # twist forms: coefficientwise Frobenius of the base forms
    n_arr = [fastpoly.from_coeffs(c.frobenius(n).coeffs) for c in bnd.n_coeffs]
    d_arr = [fastpoly.from_coeffs(c.frobenius(n).coeffs) for c in bnd.d_coeffs]
    primes = [fastpoly.from_coeffs(pi.coeffs) for pi in bnd.strip_primes]

    u = fastpoly.from_coeffs(P.x.num.coeffs)
    w = fastpoly.from_coeffs(P.x.den.coeffs)

    def H(uu, ww):
        return max(len(uu) - 1, len(ww) - 1)

    def finish(m, Hm):
        value = Fraction(Hm, 2 * pn * 4**m) + Fraction(c_up - c_low, 12 * 4**m)
        error = Fraction(spread, 12 * 4**m)
        return max(value, zero), error

    seen = set()
    snapshot_cap = max(64, H(u, w)) + 8
    m = 0
    while True:
        Hm = H(u, w)
        if Fraction(spread, 12 * 4**m) <= eps:
            return finish(m, Hm)
        if m >= max_doublings:
            raise BudgetExceededError(
                f"canonical height did not reach eps within {max_doublings} doublings")
        if 4 * Hm + max(c_up, 1) > max_degree:
            raise BudgetExceededError(
                f"doubling step {m + 1} would exceed the degree budget "
                f"({4 * Hm} > {max_degree})")

        if Hm <= snapshot_cap:
            key = _orbit_key(u, w, p)
            if key in seen:
                return zero, zero  # finite x-orbit: torsion, exactly
            seen.add(key)

        u2 = fastpoly.fp_mul(u, u, p)
        w2 = fastpoly.fp_mul(w, w, p)
        uw = fastpoly.fp_mul(u, w, p)
        pows = [fastpoly.fp_mul(w2, w2, p),
                fastpoly.fp_mul(uw, w2, p),
                fastpoly.fp_mul(uw, uw, p),
                fastpoly.fp_mul(uw, u2, p),
                fastpoly.fp_mul(u2, u2, p)]
        nu = _form_eval(n_arr, pows, p)
        nw = _form_eval(d_arr, pows, p)
        if len(nw) == 0:
            return zero, zero  # the doubling orbit hit infinity: torsion
        if len(nu) == 0:
            u, w = nu, np.ones(1, dtype=np.int64)
        else:
            for pi in primes:
                while True:
                    qw, rw = fastpoly.fp_divmod(nw, pi, p)
                    if len(rw):
                        break
                    qu, ru = fastpoly.fp_divmod(nu, pi, p)
                    if len(ru):
                        break
                    nu, nw = qu, qw
            u, w = nu, nw
        m += 1


def _form_eval(coeff_arrays, pows, p):
    acc = np.zeros(0, dtype=np.int64)
    for c, t in zip(coeff_arrays, pows):
        if len(c) == 0:
            continue
        term = fastpoly.fp_mul(c, t, p)
        if len(term) > len(acc):
            acc, term = term.copy(), acc
        else:
            acc = acc.copy()
        if len(term):
            acc[:len(term)] = (acc[:len(term)] + term) % p
    return fastpoly.trim(acc)


def _orbit_key(u, w, p):
    if len(w):
        inv = pow(int(w[-1]), p - 2, p)
    else:
        inv = pow(int(u[-1]), p - 2, p)
    un = tuple(int(c) * inv % p for c in u)
    wn = tuple(int(c) * inv % p for c in w)
    return un, wn


# ---------------------------------------------------------------------------
# reports and the Goldfeld-Szpiro / Lehmer pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightReport:
    naive: Fraction
    canonical_value: Fraction
    canonical_error: Fraction
    level: int
    epsilon: Fraction

    def to_json(self):
        return {"naive": str(self.naive),
                "canonical": {"value": str(self.canonical_value),
                              "error": str(self.canonical_error)},
                "level": self.level}


def height_report(P, eps, **kwargs):
    value, error = canonical_height(P, eps, **kwargs)
    rpt = HeightReport(naive_height(P), value, error, P.level, Fraction(eps))
    if rpt.canonical_error > rpt.epsilon:
        raise InvariantViolationError("certified error exceeded requested epsilon")
    return rpt


GS_CONSTANT = Fraction(1, 10**13)


def gs_floor(E):
    """10^-13 * deg(minimal discriminant), the Goldfeld-Szpiro floor at genus 0."""
    return GS_CONSTANT * minimal_discriminant_degree(E)


@dataclass(frozen=True)
class GsCertificate:
    curve_id: str
    deg_min_disc: int
    floor: Fraction
    point: object
    value: Fraction
    error: Fraction
    verdict: str  # pass | torsion | fail
    ratio: Fraction | None

    def to_json(self):
        out = {"curve": self.curve_id, "deg_min_disc": self.deg_min_disc,
               "floor": str(self.floor), "point": self.point.to_json(),
               "canonical": {"value": str(self.value), "error": str(self.error)},
               "verdict": self.verdict}
        if self.ratio is not None:
            out["ratio"] = str(self.ratio)
        return out


def lehmer_certificate(E, P, eps, **kwargs):
    """Check hhat(P) against the Goldfeld-Szpiro floor.

    Returns a GsCertificate with verdict torsion / pass; an ambiguous
    measurement at the requested eps raises EpsTooCoarseError, and a
    certified violation of the floor (never expected) raises
    InvariantViolationError carrying the diagnostic certificate.
    """
    from .torsion import is_torsion_point

    eps = Fraction(eps)
    floor = gs_floor(E)
    value, error = canonical_height(P, eps, **kwargs)
    cid = E.curve_id()
    deg = minimal_discriminant_degree(E)

    if value <= eps and is_torsion_point(P):
        return GsCertificate(cid, deg, floor, P, value, error, "torsion", None)
    if value - error >= floor and floor > 0:
        ratio = value / floor
        return GsCertificate(cid, deg, floor, P, value, error, "pass", ratio)
    if value - error >= 0 and floor == 0:
        # isotrivial trivial floor: nothing to certify beyond nonnegativity
        return GsCertificate(cid, deg, floor, P, value, error, "pass", None)
    if value + error < floor:
        cert = GsCertificate(cid, deg, floor, P, value, error, "fail", None)
        raise InvariantViolationError(
            f"certified canonical height below the Goldfeld-Szpiro floor: {cert.to_json()}")
    if floor < 2 * eps:
        raise EpsTooCoarseError(
            f"eps={eps} too coarse to separate the floor {floor}; shrink eps")
    cert = GsCertificate(cid, deg, floor, P, value, error, "fail", None)
    raise InvariantViolationError(f"inconsistent height certificate: {cert.to_json()}")
