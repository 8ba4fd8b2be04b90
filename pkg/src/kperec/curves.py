"""Weierstrass curves over K = F_p(t) and points of the Frobenius tower.

A point of E(K^{1/p^n}) is stored as (level n, point on the n-th Frobenius
twist E^{(p^n)} over K); the coordinatewise Frobenius bijection moves
between the two views, so all arithmetic stays inside K where gcd
reduction is cheap.  The full five-coefficient group law is used so that
p = 2 and p = 3 work uniformly.
"""

from __future__ import annotations

from functools import lru_cache

from .fields import Poly, RatFunc, parse_ratfunc, format_ratfunc, is_prime


class SingularCurveError(ValueError):
    """Raised when the discriminant of a would-be curve vanishes."""

    def __init__(self, disc):
        super().__init__(f"singular Weierstrass equation: disc = {disc}")
        self.disc = disc


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_p(t), disc != 0."""

    __slots__ = ("p", "a1", "a2", "a3", "a4", "a6", "b2", "b4", "b6", "b8",
                 "c4", "c6", "disc", "j")

    def __init__(self, p, a1, a2, a3, a4, a6):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        coeffs = []
        for a in (a1, a2, a3, a4, a6):
            if isinstance(a, int):
                a = RatFunc.const(p, a)
            elif isinstance(a, Poly):
                a = RatFunc(a)
            elif isinstance(a, str):
                a = parse_ratfunc(p, a)
            if a.p != p:
                raise ValueError("coefficient characteristic mismatch")
            coeffs.append(a)
        self.p = p
        self.a1, self.a2, self.a3, self.a4, self.a6 = coeffs
        a1, a2, a3, a4, a6 = coeffs
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
                   + a2 * a3 * a3 - a4 * a4)
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = -(self.b2 ** 3) + 36 * self.b2 * self.b4 - 216 * self.b6
        self.disc = (-(self.b2 * self.b2 * self.b8) - 8 * (self.b4 ** 3)
                     - 27 * (self.b6 * self.b6) + 9 * self.b2 * self.b4 * self.b6)
        if self.disc.is_zero():
            raise SingularCurveError(self.disc)
        self.j = self.c4 ** 3 / self.disc
        self._check_identities()

    def _check_identities(self):
        # 4 b8 = b2 b6 - b4^2 holds in every characteristic
        assert 4 * self.b8 == self.b2 * self.b6 - self.b4 * self.b4
        # 1728 disc = c4^3 - c6^2 (contentful only away from char 2, 3,
        # but the polynomial identity holds everywhere)
        assert 1728 * self.disc == self.c4 ** 3 - self.c6 * self.c6
        assert self.j * self.disc == self.c4 ** 3

    @property
    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def rhs(self, x):
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def contains(self, x, y):
        return (y * y + self.a1 * x * y + self.a3 * y) == self.rhs(x)

    def is_isotrivial(self):
        """True iff j is constant (j algebraic over F_p at genus 0)."""
        return self.j.is_constant()

    def __eq__(self, other):
        return (isinstance(other, WeierstrassCurve) and other.p == self.p
                and other.a_invariants == self.a_invariants)

    def __hash__(self):
        return hash((self.p, self.a_invariants))

    def curve_id(self):
        return "p=%d;a=[%s]" % (self.p, ",".join(format_ratfunc(a) for a in self.a_invariants))

    def to_json(self):
        return {"p": self.p, "a": [format_ratfunc(a) for a in self.a_invariants]}

    @staticmethod
    def from_json(obj, p=None):
        if "p" in obj:
            p = int(obj["p"])
        if p is None:
            raise ValueError("curve JSON needs a prime p")
        a = obj.get("a")
        if not isinstance(a, list) or len(a) != 5:
            raise ValueError('curve JSON needs "a": [a1,a2,a3,a4,a6]')
        return WeierstrassCurve(p, *a)

    def __repr__(self):
        return f"WeierstrassCurve({self.curve_id()})"


def curve_new(p, a1, a2, a3, a4, a6):
    return WeierstrassCurve(p, a1, a2, a3, a4, a6)


def short_curve(p, a4, a6):
    """y^2 = x^3 + a4 x + a6 (only sensible away from characteristic 2)."""
    return WeierstrassCurve(p, 0, 0, 0, a4, a6)


@lru_cache(maxsize=512)
def frobenius_twist(curve, n):
    """E^(p^n): every a_i raised to the p^n (twist of a twist composes)."""
    if n < 0:
        raise ValueError("twist level must be nonnegative")
    if n == 0:
        return curve
    return WeierstrassCurve(curve.p, *(a.frobenius(n) for a in curve.a_invariants))


class TowerPoint:
    """Point of E(K^{1/p^n}) as (level n, representative on E^(p^n)(K)).

    The representative is None for the point at infinity (always level 0).
    Construction normalizes the level down whenever both coordinates admit
    p-th roots (the roots then automatically satisfy the lower twist).
    """

    __slots__ = ("curve", "level", "x", "y")

    def __init__(self, curve, level, xy):
        if level < 0:
            raise ValueError("level must be nonnegative")
        if xy is None:
            self.curve, self.level, self.x, self.y = curve, 0, None, None
            return
        x, y = xy
        twist = frobenius_twist(curve, level)
        if not twist.contains(x, y):
            raise ValueError("representative not on the level twist")
        while level > 0:
            rx, ry = x.pth_root(), y.pth_root()
            if rx is None or ry is None:
                break
            lower = frobenius_twist(curve, level - 1)
            assert lower.contains(rx, ry), "p-th roots must satisfy the lower twist"
            x, y, level = rx, ry, level - 1
        self.curve, self.level, self.x, self.y = curve, level, x, y

    @staticmethod
    def infinity(curve):
        return TowerPoint(curve, 0, None)

    @staticmethod
    def affine(curve, x, y, level=0):
        p = curve.p
        if isinstance(x, str):
            x = parse_ratfunc(p, x)
        if isinstance(y, str):
            y = parse_ratfunc(p, y)
        return TowerPoint(curve, level, (x, y))

    @property
    def is_infinity(self):
        return self.x is None

    @property
    def rep(self):
        return None if self.x is None else (self.x, self.y)

    def twist_curve(self):
        return frobenius_twist(self.curve, self.level)

    def __eq__(self, other):
        if not isinstance(other, TowerPoint):
            return NotImplemented
        return (self.curve == other.curve and self.level == other.level
                and self.x == other.x and self.y == other.y)

    def __hash__(self):
        return hash((self.curve, self.level, self.x, self.y))

    def __neg__(self):
        if self.is_infinity:
            return self
        tw = self.twist_curve()
        return TowerPoint(self.curve, self.level,
                          (self.x, -self.y - tw.a1 * self.x - tw.a3))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, -other)

    def __rmul__(self, m):
        return scalar_mul(m, self)

    def __mul__(self, m):
        return scalar_mul(m, self)

    def perf_coordinates(self):
        """Coordinates as elements of K^per (recovered on demand)."""
        from .fields import PerfElement

        if self.is_infinity:
            return None
        return PerfElement(self.x, self.level), PerfElement(self.y, self.level)

    def to_json(self):
        if self.is_infinity:
            return {"infinity": True}
        return {"level": self.level, "x": format_ratfunc(self.x),
                "y": format_ratfunc(self.y)}

    @staticmethod
    def from_json(curve, obj):
        if obj.get("infinity"):
            return TowerPoint.infinity(curve)
        level = int(obj.get("level", 0))
        return TowerPoint.affine(curve, obj["x"], obj["y"], level)

    def __repr__(self):
        if self.is_infinity:
            return "TowerPoint(infinity)"
        return (f"TowerPoint(level={self.level}, x={format_ratfunc(self.x)}, "
                f"y={format_ratfunc(self.y)})")


def _lift_rep(point, level):
    """Representative of the point on the level twist (level >= point.level)."""
    d = level - point.level
    if d == 0:
        return point.x, point.y
    return point.x.frobenius(d), point.y.frobenius(d)


def add(P, Q):
    """Abelian group law; mixed levels are lifted to the common twist."""
    if P.curve != Q.curve:
        raise ValueError("points on different base curves")
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    level = max(P.level, Q.level)
    x1, y1 = _lift_rep(P, level)
    x2, y2 = _lift_rep(Q, level)
    E = frobenius_twist(P.curve, level)
    a1, a2, a3, a4, a6 = E.a_invariants

    if x1 == x2:
        if y2 == -y1 - a1 * x1 - a3:
            return TowerPoint.infinity(P.curve)
        # duplication: lambda = (3x^2 + 2a2 x + a4 - a1 y) / (2y + a1 x + a3)
        denom = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denom
        nu = (-(x1 ** 3) + a4 * x1 + 2 * a6 - a3 * y1) / denom
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return TowerPoint(P.curve, level, (x3, y3))


def scalar_mul(m, P):
    """m P by double-and-add; negative m through the inverse."""
    if m < 0:
        return scalar_mul(-m, -P)
    R = TowerPoint.infinity(P.curve)
    Q = P
    while m:
        if m & 1:
            R = add(R, Q)
        Q = add(Q, Q)
        m >>= 1
    return R


def frobenius_map(P):
    """F: raises coordinates to the p-th power; lands on E^(p).

    For a level-n point the stored representative is unchanged and the
    level drops by one (the bijection shifts which field the point lives
    over); at level 0 the representative itself moves onto the twist.
    """
    target = frobenius_twist(P.curve, 1)
    if P.is_infinity:
        return TowerPoint.infinity(target)
    if P.level == 0:
        return TowerPoint(target, 0, (P.x.frobenius(), P.y.frobenius()))
    return TowerPoint(target, P.level - 1, (P.x, P.y))


def frobenius_inverse(curve, Q):
    """The unique P on `curve` with F(P) = Q, for Q a level-0 point on E^(p)."""
    if Q.curve != frobenius_twist(curve, 1) or Q.level != 0:
        raise ValueError("expected a level-0 point on the first twist")
    if Q.is_infinity:
        return TowerPoint.infinity(curve)
    return TowerPoint(curve, 1, (Q.x, Q.y))


def verschiebung(curve, Q):
    """V with V(F(P)) = pP; maps E^(p)(K) into E(K) (level 0, asserted)."""
    P = frobenius_inverse(curve, Q)
    R = scalar_mul(curve.p, P)
    if R.level != 0:
        raise AssertionError("Verschiebung left the base field; arithmetic bug")
    return R


def is_isotrivial(curve):
    return curve.is_isotrivial()
