"""Torsion subgroups over K and over truncations of the perfect closure.

The prime-to-p torsion is bounded by point counts over two good residue
fields (reduction is injective on it) and then realized by solving
division polynomials over K; the p-part is found by direct p-division
within K.  Division polynomials use the f-normalization: psi_m = f_m for
odd m and psi_2 * f_m for even m, with f_m in K[x], which keeps every
recurrence inside K[x] in all characteristics.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExceededError, InputError
from .fields import Place, Poly, RatFunc, monic_irreducibles
from .residue import (FqElem, KField, FPoly, ResidueField, fq_roots,
                      ratfunc_poly_roots)
from .curves import TowerPoint, WeierstrassCurve, frobenius_twist, scalar_mul
from .tate import _infinity_model, _tate_finite


class BadReductionError(InputError):
    """The curve does not have good reduction at the requested place."""


# ---------------------------------------------------------------------------
# reduction and point counts
# ---------------------------------------------------------------------------

class FiniteCurve:
    """Reduction of E at a place of good reduction."""

    def __init__(self, E, place):
        if place.is_infinite:
            model, pi = _infinity_model(E), Poly.t(E.p)
        else:
            model, pi = E, place.poly
        data = _tate_finite(model, pi)
        if data.v_min_disc != 0:
            raise BadReductionError(f"bad reduction ({data.kodaira}) at {place}")
        self.curve = E
        self.place = place
        self.transform = data.transform
        self.model = data.transform.apply(model)
        self.k = ResidueField(pi)
        self.a = tuple(self.k.reduce(ai) for ai in self.model.a_invariants)

    @property
    def q(self):
        return self.k.q

    def rhs(self, x):
        a1, a2, a3, a4, a6 = self.a
        return ((x + a2) * x + a4) * x + a6

    def linear_y(self, x):
        a1, a2, a3, a4, a6 = self.a
        return a1 * x + a3

    def contains(self, pt):
        if pt is None:
            return True
        x, y = pt
        return y * y + self.linear_y(x) * y == self.rhs(x)

    def _trace_to_f2(self, c):
        acc = c
        t = c
        for _ in range(self.q.bit_length() - 2):
            t = t * t
            acc = acc + t
        return acc

    def y_count(self, x):
        """Number of points with this x-coordinate."""
        L = self.linear_y(x)
        R = self.rhs(x)
        if self.k.p == 2:
            if not L:
                return 1
            c = R / (L * L)
            return 2 if not self._trace_to_f2(c) else 0
        disc = L * L + 4 * R
        if not disc:
            return 1
        return 2 if disc.is_square() else 0

    def lift_y(self, x):
        """The y-coordinates over this x, as residue field elements."""
        L = self.linear_y(x)
        R = self.rhs(x)
        k = self.k
        if k.p == 2:
            if not L:
                return [R.sqrt()]
            c = R / (L * L)
            if self._trace_to_f2(c):
                return []
            artin_schreier = FPoly(k, [-c, k.one(), k.one()])  # z^2 + z - c
            return [L * z for z in fq_roots(artin_schreier)]
        disc = L * L + 4 * R
        root = disc.sqrt()
        if root is None:
            return []
        inv2 = k.from_int(2).inverse()
        if not disc:
            return [(-L) * inv2]
        return [(-L + root) * inv2, (-L - root) * inv2]

    def count_points(self, budget=200_000):
        if self.q > budget:
            raise BudgetExceededError(
                f"residue field size {self.q} exceeds the counting budget")
        total = 1  # infinity
        for x in self.k.elements():
            total += self.y_count(x)
        return total

    # -- group law over the residue field --------------------------------
    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        a1, a2, a3, a4, a6 = self.a
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if y2 == -y1 - a1 * x1 - a3:
                return None
            denom = y1 + y1 + a1 * x1 + a3
            lam = (x1 * x1 * 3 + a2 * x1 * 2 + a4 - a1 * y1) / denom
            nu = (-(x1 * x1 * x1) + a4 * x1 + a6 + a6 - a3 * y1) / denom
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = y1 - lam * x1
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return (x3, y3)

    def mul(self, n, P):
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = None
        Q = P
        while n:
            if n & 1:
                R = self.add(R, Q)
            Q = self.add(Q, Q)
            n >>= 1
        return R

    def neg(self, P):
        if P is None:
            return None
        a1, a2, a3, a4, a6 = self.a
        x, y = P
        return (x, -y - a1 * x - a3)

    def point_order(self, P, group_order):
        for d in sorted(_divisors(group_order)):
            if self.mul(d, P) is None:
                return d
        raise AssertionError("order must divide the group order")

    def reduce_point(self, P):
        """Image of a level-0 point of E under reduction at this place."""
        if P.level != 0:
            raise ValueError("reduce level-0 points only")
        if P.is_infinity:
            return None
        x, y = P.x, P.y
        if self.place.is_infinite:
            x, y = x.subs_inverse(), y.subs_inverse()
        tr = self.transform
        xm = (x - tr.r) / (tr.u * tr.u)
        ym = (y - tr.w - tr.u * tr.u * tr.s * xm) / (tr.u ** 3)
        try:
            red = (self.k.reduce(xm), self.k.reduce(ym))
        except ZeroDivisionError:
            return None  # the point reduces to the zero section
        if not self.contains(red):
            raise AssertionError("reduction left the curve; transform bug")
        return red


def count_points(E, place, budget=200_000):
    """|E~(F_q)| at a place of good reduction, by exhaustive enumeration."""
    return FiniteCurve(E, place).count_points(budget)


def good_places(E, count=2, max_degree=6):
    """The first `count` good finite places, by (degree, lex) on monic irreducibles."""
    out = []
    for pi in monic_irreducibles(E.p, max_degree):
        try:
            out.append((Place.finite(pi), FiniteCurve(E, Place.finite(pi))))
        except BadReductionError:
            continue
        if len(out) == count:
            return out
    raise InputError(
        f"fewer than {count} good places of degree <= {max_degree}; raise the bound")


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


# ---------------------------------------------------------------------------
# division polynomials (f-normalized) over K
# ---------------------------------------------------------------------------

class DivisionPolys:
    """f_m in K[x] with psi_m = f_m (m odd), psi_2 * f_m (m even).

    Root searches are pruned by the torsion height bound: a torsion point
    has canonical height 0, so its naive height is at most c_low/3 from the
    telescoped duplication bound.
    """

    def __init__(self, E):
        from .heights import _duplication_bound

        self.E = E
        self.x_height_cap = _duplication_bound(E).c_low // 3 + 1
        self.field = KField(E.p)
        K = self.field

        def xpoly(coeffs):
            return FPoly(K, [c if isinstance(c, RatFunc) else RatFunc.const(E.p, c)
                             for c in coeffs])

        b2, b4, b6, b8 = E.b2, E.b4, E.b6, E.b8
        self.S = xpoly([b6, 2 * b4, b2, RatFunc.const(E.p, 4)])  # psi_2^2
        self._f = {
            0: FPoly.zero(K),
            1: FPoly.one(K),
            2: FPoly.one(K),
            3: xpoly([b8, 3 * b6, 3 * b4, b2, RatFunc.const(E.p, 3)]),
            4: xpoly([b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6,
                      5 * b4, b2, RatFunc.const(E.p, 2)]),
        }

    def f(self, m):
        if m < 0:
            raise ValueError("index must be nonnegative")
        if m in self._f:
            return self._f[m]
        n = m // 2
        S2 = self.S * self.S
        if m % 2:  # m = 2n + 1
            t1 = self.f(n + 2) * self.f(n) * self.f(n) * self.f(n)
            t2 = self.f(n - 1) * self.f(n + 1) * self.f(n + 1) * self.f(n + 1)
            out = (t1 * S2 - t2) if n % 2 == 0 else (t1 - t2 * S2)
        else:  # m = 2n
            inner = (self.f(n + 2) * self.f(n - 1) * self.f(n - 1)
                     - self.f(n - 2) * self.f(n + 1) * self.f(n + 1))
            out = self.f(n) * inner
        self._f[m] = out
        return out

    def psi_squared(self, m):
        fm = self.f(m)
        sq = fm * fm
        return sq if m % 2 else sq * self.S

    def phi(self, m):
        """x * psi_m^2 - psi_{m+1} psi_{m-1}, a pure polynomial in x."""
        K = self.field
        x = FPoly.x(K)
        cross = self.f(m + 1) * self.f(m - 1)
        if m % 2:
            return x * self.psi_squared(m) - cross * self.S
        return x * self.psi_squared(m) - cross

    def torsion_x_candidates(self, m):
        """x-coordinates in K that can carry m-torsion (divisors of m included)."""
        if m < 2:
            return []
        poly = self.psi_squared(m)
        if poly.is_constant():
            return []
        return ratfunc_poly_roots(self.field, poly.coeffs,
                                  max_height=self.x_height_cap)

    def division_x_candidates(self, m, x_target):
        """Solutions x of x(mQ) = x_target, as roots of phi_m - x_target*psi_m^2.

        Only torsion solutions are sought, so the same height cap applies.
        """
        diff = self.phi(m) - self.psi_squared(m).scale(x_target)
        if diff.is_constant():
            return []
        return ratfunc_poly_roots(self.field, diff.coeffs,
                                  max_height=self.x_height_cap)


def lift_x(E, x):
    """All y in K with (x, y) on E (the curve's own field of definition)."""
    p = E.p
    L = E.a1 * x + E.a3
    R = E.rhs(x)
    if p == 2:
        if L.is_zero():
            root = _ratfunc_sqrt_char2(R)
            return [root] if root is not None else []
        c = R / (L * L)
        zs = artin_schreier_roots(c)
        return [L * z for z in zs]
    disc = L * L + 4 * R
    inv2 = RatFunc.const(p, pow(2, p - 2, p))
    if disc.is_zero():
        return [(-L) * inv2]
    root = disc.sqrt()
    if root is None:
        return []
    return [(-L + root) * inv2, (-L - root) * inv2]


def _ratfunc_sqrt_char2(f):
    return f.pth_root()


def artin_schreier_roots(c):
    """Solutions z in F_2(t) of z^2 + z = c (0, 1 or 2 of them; char 2)."""
    p = c.p
    if p != 2:
        raise ValueError("Artin-Schreier solver is char-2 only")
    den_root = c.den.pth_root()
    if den_root is None:
        return []
    B = den_root
    C = c.num  # A^2 + A B = C with z = A / B
    dC = C.degree if C.coeffs else -1
    dB = B.degree
    D = max((dC + 1) // 2, dB, 0)
    rows = max(2 * D, D + dB, dC) + 1
    # F_2-linear system in the coefficients of A
    mat = [[0] * (D + 1) for _ in range(rows)]
    rhs = [0] * rows
    for i in range(D + 1):
        mat[2 * i][i] ^= 1
        for j, bj in enumerate(B.coeffs):
            if bj:
                mat[i + j][i] ^= 1
    for i, ci in enumerate(C.coeffs):
        rhs[i] = ci
    sol = _solve_gf2(mat, rhs)
    if sol is None:
        return []
    A = Poly(2, sol)
    z = RatFunc(A, B)
    assert z * z + z == c
    return [z, z + RatFunc.one(2)]


def _solve_gf2(mat, rhs):
    rows, cols = len(mat), len(mat[0])
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    pivot_rows = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(rows):
            if i != r and m[i][c]:
                m[i] = [a ^ b for a, b in zip(m[i], m[r])]
        pivot_rows.append(c)
        r += 1
    for i in range(r, rows):
        if m[i][cols]:
            return None
    sol = [0] * cols
    for i, c in enumerate(pivot_rows):
        sol[c] = m[i][cols]
    return sol


# ---------------------------------------------------------------------------
# torsion subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorsionGroup:
    structure: tuple        # invariant factors (d1, d2) with d1 | d2; () trivial
    generators: tuple       # TowerPoints
    order: int
    stabilized_at: int | None = None

    def to_json(self):
        out = {"structure": list(self.structure),
               "generators": [g.to_json() for g in self.generators]}
        if self.stabilized_at is not None:
            out["stabilized_at"] = self.stabilized_at
        return out


def _two_torsion_points(E):
    """Points with 2P = O, via the characteristic-appropriate x-condition."""
    p = E.p
    pts = []
    if p == 2:
        if E.a1.is_zero():
            return []  # supersingular in char 2: no 2-torsion
        x = E.a3 / E.a1
        for y in lift_x(E, x):
            pts.append((x, y))
        return pts
    from .heights import _duplication_bound

    K = KField(p)
    cap = _duplication_bound(E).c_low // 3 + 1
    cubic = FPoly(K, [E.b6, 2 * E.b4, E.b2, RatFunc.const(p, 4)])
    for x in ratfunc_poly_roots(K, cubic.coeffs, max_height=cap):
        for y in lift_x(E, x):
            pts.append((x, y))
    return pts


def _order_points(E, dp, ell, max_power, budget=64):
    """All K-points whose order is a power of ell dividing ell^max_power."""
    inf = TowerPoint.infinity(E)
    found = {inf}
    if ell == 2:
        first = _two_torsion_points(E)
    else:
        first = [(x, y) for x in dp.torsion_x_candidates(ell)
                 for y in lift_x(E, x)]
    current = []
    for (x, y) in first:
        P = TowerPoint(E, 0, (x, y))
        if scalar_mul(ell, P).is_infinity and P not in found:
            found.add(P)
            found.add(-P)
            current.append(P)
    power = 1
    while power < max_power and current:
        nxt = []
        for T in current:
            for x in dp.division_x_candidates(ell, T.x):
                for y in lift_x(E, x):
                    Q = TowerPoint(E, 0, (x, y))
                    img = scalar_mul(ell, Q)
                    if img == T or img == -T:
                        R = Q if img == T else -Q
                        if R not in found:
                            found.add(R)
                            found.add(-R)
                            nxt.append(R)
        current = nxt
        power += 1
        if len(found) > budget:
            raise BudgetExceededError("torsion search exceeded its budget")
    return found


def _group_closure(points):
    """Closure of a finite set of torsion TowerPoints under the group law."""
    base = set(points)
    inf = next(p for p in base if p.is_infinity)
    frontier = list(base)
    while frontier:
        fresh = []
        for P in frontier:
            for Q in list(base):
                R = P + Q
                if R not in base:
                    base.add(R)
                    fresh.append(R)
        frontier = fresh
        if len(base) > 4096:
            raise BudgetExceededError("torsion closure exceeded its budget")
    return base


def _structure_from_group(points):
    """Invariant factors (d1, d2) and matching generators of a finite group."""
    pts = [P for P in points]
    n = len(pts)
    if n == 1:
        return (), ()
    orders = {}
    for P in pts:
        Q = P
        o = 1
        while not Q.is_infinity:
            Q = Q + P
            o += 1
        orders[P] = o
    d2 = max(orders.values())
    g2 = next(P for P, o in orders.items() if o == d2)
    if d2 == n:
        return (d2,), (g2,)
    d1 = n // d2
    sub2 = set()
    Q = TowerPoint.infinity(g2.curve)
    for _ in range(d2):
        sub2.add(Q)
        Q = Q + g2
    for P, o in sorted(orders.items(), key=lambda kv: (kv[1], str(kv[0].to_json()))):
        if o == d1 and P not in sub2:
            span = {A + B for A in _cycle(P, d1) for B in sub2}
            if len(span) == n:
                return (d1, d2), (P, g2)
    raise AssertionError("failed to split the torsion group into two cycles")


def _cycle(P, order):
    out = []
    Q = TowerPoint.infinity(P.curve)
    for _ in range(order):
        out.append(Q)
        Q = Q + P
    return out


def _prime_factors(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def torsion_subgroup(E, max_place_degree=6, p_power_cap=2):
    """The torsion subgroup of E(K), as structure plus generators."""
    places = good_places(E, 2, max_place_degree)
    counts = [fc.count_points() for _, fc in places]
    g = counts[0]
    for c in counts[1:]:
        g = _gcd(g, c)
    p = E.p
    prime_to_p = g
    while prime_to_p % p == 0:
        prime_to_p //= p
    dp = DivisionPolys(E)
    pts = {TowerPoint.infinity(E)}
    for ell, e in _prime_factors(prime_to_p).items():
        pts |= _order_points(E, dp, ell, e)
    pts |= _order_points(E, dp, p, p_power_cap)
    group = _group_closure(pts)
    structure, gens = _structure_from_group(group)
    order = 1
    for d in structure:
        order *= d
    return TorsionGroup(structure, gens, max(order, 1))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def torsion_perfect_closure(E, max_level, **kwargs):
    """Torsion of E(K^{1/p^n}) for n <= max_level, with observed stabilization.

    The prime-to-p part equals that of E(K) exactly; the p-part is read off
    the twists through the Frobenius bijection.  The reported stabilization
    level is observational (no effective uniform bound is available).
    """
    if max_level < 0:
        raise ValueError("max_level must be nonnegative")
    base = torsion_subgroup(E, **kwargs)
    best = base
    best_level = 0
    growth_level = 0
    prime_to_p_order = base.order
    p = E.p
    while prime_to_p_order % p == 0:
        prime_to_p_order //= p
    for n in range(1, max_level + 1):
        tw = torsion_subgroup(frobenius_twist(E, n), **kwargs)
        tw_p2p = tw.order
        while tw_p2p % p == 0:
            tw_p2p //= p
        if tw_p2p != prime_to_p_order:
            raise AssertionError("prime-to-p torsion changed along the tower")
        if tw.order > best.order:
            pulled = []
            for g in tw.generators:
                if g.is_infinity:
                    continue
                pulled.append(TowerPoint(E, n, (g.x, g.y)))
            pulled_group = _group_closure(
                {TowerPoint.infinity(E), *pulled,
                 *(g for g in base.generators)})
            structure, gens = _structure_from_group(pulled_group)
            best = TorsionGroup(structure, gens, len(pulled_group))
            best_level = n
            growth_level = n
    return TorsionGroup(best.structure, best.generators, best.order,
                        stabilized_at=growth_level)


def is_torsion_point(P, max_place_degree=6):
    """Exact torsion test.

    The prime-to-p order divides the gcd of two good-place counts
    (reduction is injective on prime-to-p torsion); the p-power part is
    chased with a height guard: every multiple of a torsion point has
    naive height at most c_low/3, so exceeding that certifies non-torsion,
    and non-torsion heights grow quadratically, so the chase terminates.
    """
    from fractions import Fraction

    from .fields import func_height
    from .heights import _duplication_bound

    if P.is_infinity:
        return True
    E = frobenius_twist(P.curve, P.level)
    rep = TowerPoint(E, 0, (P.x, P.y))
    cap = Fraction(_duplication_bound(E).c_low, 3)

    def too_high(Q):
        return not Q.is_infinity and func_height(Q.x) > cap

    if too_high(rep):
        return False
    places = good_places(E, 2, max_place_degree)
    g = _gcd(places[0][1].count_points(), places[1][1].count_points())
    p = E.p
    while g % p == 0:
        g //= p
    for d in _divisors(g):
        Q = scalar_mul(d, rep)
        seen = set()
        while True:
            if Q.is_infinity:
                return True
            if too_high(Q):
                return False  # some multiple exceeded the torsion height cap
            if Q in seen:
                break  # cycling without infinity: this divisor fails
            seen.add(Q)
            Q = scalar_mul(p, Q)
    return False
