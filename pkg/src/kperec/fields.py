"""Exact arithmetic in F_p, F_p[t] and K = F_p(t).

Polynomials over F_p are immutable coefficient tuples (index = power of t,
highest index nonzero).  Rational functions are reduced fractions with a
monic denominator.  Places of K are monic irreducible polynomials plus the
degree valuation at infinity; they are produced on demand (from
factorizations), never as a global list.

Everything here is exact; the zero polynomial has degree -inf (a dedicated
sentinel, so valuation code cannot silently mix it with honest degrees).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import random

import numpy as np

NEG_INF = -math.inf
POS_INF = math.inf

_CONV_NUMPY_MIN = 48  # below this, pure-Python convolution wins


class ParseError(ValueError):
    """Malformed rational-function string; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def is_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin, valid far beyond the intended p <= 97
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p with elements as canonical residues in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_square(self, a):
        a %= self.p
        if a == 0 or self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a):
        """A square root of a, or None.  p is small; scanning is exact and fine."""
        a %= self.p
        if self.p == 2 or a == 0:
            return a
        if not self.is_square(a):
            return None
        for r in range(1, self.p):
            if r * r % self.p == a:
                return r
        return None

    def elements(self):
        return range(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


@lru_cache(maxsize=None)
def prime_field(p):
    return PrimeField(p)


class Poly:
    """Element of F_p[t]: immutable, canonical (no trailing zero coefficients)."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p, coeffs):
        self.p = p
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(p):
        return Poly(p, ())

    @staticmethod
    def one(p):
        return Poly(p, (1,))

    @staticmethod
    def const(p, c):
        return Poly(p, (c,))

    @staticmethod
    def t(p):
        return Poly(p, (0, 1))

    @staticmethod
    def monomial(p, c, k):
        return Poly(p, (0,) * k + (c,))

    # -- basic structure ----------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return self.coeffs == (1,)

    def is_constant(self):
        return len(self.coeffs) <= 1

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.p, other)
        return isinstance(other, Poly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    # -- ring operations ----------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other
        if isinstance(other, int):
            return Poly.const(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, bi in enumerate(b):
            cs[i] = (cs[i] + bi) % self.p
        return Poly(self.p, cs)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.p, [(-c) % self.p for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.p)
        if min(len(a), len(b)) < _CONV_NUMPY_MIN:
            out = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] += ai * bj
            return Poly(self.p, out)
        from . import fastpoly

        out = fastpoly.fp_mul(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), self.p)
        return Poly(self.p, out.tolist())

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = other.coeffs
        dd = len(d) - 1
        inv_lc = pow(d[-1], p - 2, p)
        q = [0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1 - dd, -1, -1):
            c = r[i + dd] % p
            if c:
                c = c * inv_lc % p
                q[i] = c
                for j, dj in enumerate(d):
                    r[i + j] = (r[i + j] - c * dj) % p
        return Poly(p, q), Poly(p, r[:dd])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero() or self.is_monic():
            return self
        inv = pow(self.lc(), self.p - 2, self.p)
        return Poly(self.p, [c * inv % self.p for c in self.coeffs])

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other):
        """Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic."""
        p = self.p
        a, b = self, self._coerce(other)
        u0, v0 = Poly.one(p), Poly.zero(p)
        u1, v1 = Poly.zero(p), Poly.one(p)
        while not b.is_zero():
            q, r = a.divmod(b)
            a, b = b, r
            u0, u1 = u1, u0 - q * u1
            v0, v1 = v1, v0 - q * v1
        if a.is_zero():
            return a, u0, v0
        c = pow(a.lc(), p - 2, p)
        scale = Poly.const(p, c)
        return a.monic(), u0 * scale, v0 * scale

    def derivative(self):
        return Poly(self.p, [(i * c) % self.p for i, c in enumerate(self.coeffs)][1:])

    def pow_mod(self, n, modulus):
        result = Poly.one(self.p)
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def __call__(self, x):
        """Evaluate at x in F_p."""
        y = 0
        for c in reversed(self.coeffs):
            y = (y * x + c) % self.p
        return y

    def frobenius(self, n=1):
        """self**(p**n), computed by coefficient spreading (c**p = c in F_p)."""
        if self.is_zero() or n == 0:
            return self
        q = self.p**n
        cs = [0] * (self.degree * q + 1)
        for i, c in enumerate(self.coeffs):
            cs[i * q] = c
        return Poly(self.p, cs)

    def pth_root(self):
        """g with g**p = self, or None (exists iff only t^(p*i) terms occur)."""
        if self.is_zero():
            return self
        p = self.p
        for i, c in enumerate(self.coeffs):
            if c and i % p:
                return None
        return Poly(p, [self.coeffs[i] for i in range(0, len(self.coeffs), p)])

    def sqrt(self):
        """g with g*g = self, or None.  Top-down coefficient recurrence."""
        if self.is_zero():
            return self
        p = self.p
        if p == 2:
            return self.pth_root()
        d = self.degree
        if d % 2:
            return None
        f = prime_field(p)
        lead = f.sqrt(self.lc())
        if lead is None:
            return None
        half = d // 2
        s = [0] * (half + 1)
        s[half] = lead
        inv2lead = f.inv(2 * lead % p)
        g = self.coeffs
        for k in range(half - 1, -1, -1):
            acc = g[half + k]
            for i in range(k + 1, half):
                acc -= s[i] * s[half + k - i]
            s[k] = acc * inv2lead % p
        cand = Poly(p, s)
        return cand if cand * cand == self else None

    def reverse(self, length=None):
        """t**length * self(1/t) as a polynomial (length defaults to degree)."""
        if self.is_zero():
            return self
        n = self.degree if length is None else length
        cs = [0] * (n + 1)
        for i, c in enumerate(self.coeffs):
            if n - i >= 0:
                cs[n - i] = c
        return Poly(self.p, cs)

    def __repr__(self):
        return f"Poly({self.p}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# factorization over F_p
# ---------------------------------------------------------------------------

def _squarefree_decomposition(f):
    """Yield (squarefree monic factor, multiplicity) covering f, char-p aware."""
    p = f.p
    out = []

    def rec(g, mult):
        if g.is_constant():
            return
        d = g.derivative()
        if d.is_zero():
            # g = h(t^p) = (pth root)**p
            rec(g.pth_root(), mult * p)
            return
        c = g.gcd(d)
        w = g // c
        i = 1
        while not w.is_constant():
            y = w.gcd(c)
            a = w // y
            if not a.is_constant():
                out.append((a.monic(), i * mult))
            w, c = y, c // y
            i += 1
        if not c.is_constant():
            rec(c, mult)

    rec(f.monic(), 1)
    return out


def _distinct_degree(f):
    """Split squarefree monic f into products of irreducibles of equal degree."""
    p = f.p
    out = []
    x = Poly.t(p)
    h = x % f
    g = f
    d = 0
    while g.degree > 2 * (d + 1) - 1:
        d += 1
        h = h.pow_mod(p, g)
        factor = g.gcd(h - x)
        if not factor.is_constant():
            out.append((factor, d))
            g = g // factor
            h = h % g
    if not g.is_constant():
        out.append((g, g.degree))
    return out


def _split_equal_degree(f, d, rng):
    """Cantor-Zassenhaus splitting of squarefree f = product of degree-d primes."""
    p = f.p
    if f.degree == d:
        return [f]
    n = f.degree
    while True:
        r = Poly(p, [rng.randrange(p) for _ in range(n)] + [1])
        if p == 2:
            # trace map over F_{2^d}
            h = r % f
            acc = h
            for _ in range(d - 1):
                h = h.pow_mod(2, f)
                acc = acc + h
            g = f.gcd(acc)
        else:
            e = (p**d - 1) // 2
            g = f.gcd(r.pow_mod(e, f) - Poly.one(p))
        if 0 < g.degree < f.degree:
            return _split_equal_degree(g, d, rng) + _split_equal_degree(f // g, d, rng)


def poly_factor(f):
    """Factor f into monic irreducibles.

    Returns (leading coefficient, sorted list of (irreducible, exponent)).
    Splitting randomness is seeded from f, so output is deterministic.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    lead = f.lc()
    factors = {}
    rng = random.Random(hash((f.p, f.coeffs)) & 0xFFFFFFFF)
    for sqf, mult in _squarefree_decomposition(f):
        for part, d in _distinct_degree(sqf):
            for irr in _split_equal_degree(part, d, rng):
                key = irr.monic()
                factors[key] = factors.get(key, 0) + mult
    items = sorted(factors.items(), key=lambda kv: (kv[0].degree, kv[0].coeffs))
    return lead, items


def is_irreducible(f):
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    _, factors = poly_factor(f)
    return len(factors) == 1 and factors[0][1] == 1 and factors[0][0] == f.monic()


def monic_polys(p, degree):
    """Iterate all monic polynomials of exactly the given degree, lexicographically."""
    if degree == 0:
        yield Poly.one(p)
        return
    total = p**degree
    for n in range(total):
        cs = []
        m = n
        for _ in range(degree):
            cs.append(m % p)
            m //= p
        cs.append(1)
        yield Poly(p, cs)


def monic_irreducibles(p, max_degree):
    """Monic irreducibles of degree <= max_degree, by (degree, lex)."""
    for d in range(1, max_degree + 1):
        for f in monic_polys(p, d):
            if is_irreducible(f):
                yield f


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Element of K = F_p(t) as a reduced num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        if den is None:
            den = Poly.one(num.p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.p != den.p:
            raise ValueError("mixed characteristics")
        if not _reduced:
            if num.is_zero():
                den = Poly.one(num.p)
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num // g, den // g
                if not den.is_monic():
                    c = pow(den.lc(), den.p - 2, den.p)
                    scale = Poly.const(den.p, c)
                    num, den = num * scale, den * scale
        self.num = num
        self.den = den

    @property
    def p(self):
        return self.num.p

    @staticmethod
    def zero(p):
        return RatFunc(Poly.zero(p))

    @staticmethod
    def one(p):
        return RatFunc(Poly.one(p))

    @staticmethod
    def const(p, c):
        return RatFunc(Poly.const(p, c))

    @staticmethod
    def t(p):
        return RatFunc(Poly.t(p))

    @staticmethod
    def from_poly(f):
        return RatFunc(f)

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_one()

    def is_polynomial(self):
        return self.den.is_one()

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, int):
            return RatFunc(Poly.const(self.p, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero in K")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return (RatFunc.one(self.p) / self) ** (-n)
        return RatFunc(self.num**n, self.den**n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def frobenius(self, n=1):
        """self**(p**n) by coefficient spreading; denominator stays monic."""
        return RatFunc(self.num.frobenius(n), self.den.frobenius(n), _reduced=True)

    def pth_root(self):
        """g with g**p = self, or None."""
        rn = self.num.pth_root()
        if rn is None:
            return None
        rd = self.den.pth_root()
        if rd is None:
            return None
        return RatFunc(rn, rd, _reduced=True)

    def sqrt(self):
        rn = self.num.sqrt()
        if rn is None:
            return None
        rd = self.den.sqrt()
        if rd is None:
            return None
        return RatFunc(rn, rd)

    def subs_inverse(self):
        """The rational function f(1/t), reduced."""
        m = max(self.num.degree, self.den.degree)
        if self.is_zero():
            return self
        return RatFunc(self.num.reverse(m), self.den.reverse(m))

    def evaluate(self, x):
        """Evaluate at x in F_p; raises ZeroDivisionError at a pole."""
        dv = self.den(x)
        if dv == 0:
            raise ZeroDivisionError("pole of rational function")
        nv = self.num(x)
        return nv * pow(dv, self.p - 2, self.p) % self.p

    def __repr__(self):
        return f"RatFunc({self.p}, {format_ratfunc(self)!r})"

    def __str__(self):
        return format_ratfunc(self)


# ---------------------------------------------------------------------------
# places and valuations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of F_p(t): Finite(monic irreducible) or the infinite place."""

    p: int
    poly: Poly | None  # None encodes the infinite place

    def __post_init__(self):
        if self.poly is not None:
            if not self.poly.is_monic():
                raise ValueError("finite place requires a monic polynomial")
            if not is_irreducible(self.poly):
                raise ValueError(f"not irreducible: {self.poly}")
            if self.poly.p != self.p:
                raise ValueError("mixed characteristics")

    @staticmethod
    def finite(poly):
        return Place(poly.p, poly.monic())

    @staticmethod
    def infinite(p):
        return Place(p, None)

    @property
    def is_infinite(self):
        return self.poly is None

    def residue_degree(self):
        return 1 if self.poly is None else self.poly.degree

    def serialize(self):
        return "inf" if self.poly is None else format_poly(self.poly)

    @staticmethod
    def parse(p, s):
        if s.strip() == "inf":
            return Place.infinite(p)
        f = parse_ratfunc(p, s)
        if not f.is_polynomial():
            raise ValueError(f"place must be a polynomial or 'inf': {s}")
        return Place.finite(f.num)

    def __str__(self):
        return self.serialize()


def poly_ord(f, pi):
    """Exponent of the irreducible pi in f (f nonzero)."""
    if f.is_zero():
        return POS_INF
    n = 0
    while True:
        q, r = f.divmod(pi)
        if not r.is_zero():
            return n
        f = q
        n += 1


def valuation(f, place):
    """The normalized valuation of f in K at the place (+inf for f = 0)."""
    if isinstance(f, Poly):
        f = RatFunc(f)
    if f.is_zero():
        return POS_INF
    if place.is_infinite:
        return f.den.degree - f.num.degree
    return poly_ord(f.num, place.poly) - poly_ord(f.den, place.poly)


def residue_degree(place):
    return place.residue_degree()


def pth_root(f):
    """g with g**p = f, or None when f is not a p-th power in K."""
    if isinstance(f, Poly):
        f = RatFunc(f)
    return f.pth_root()


def func_height(f):
    """H(f) = max(deg num, deg den); H(0) = 0 by convention."""
    if isinstance(f, Poly):
        f = RatFunc(f)
    if f.is_zero():
        return 0
    return max(f.num.degree, f.den.degree)


def places_of(f):
    """The finite places where f has a zero or pole, plus infinity."""
    if isinstance(f, Poly):
        f = RatFunc(f)
    if f.is_zero():
        raise ValueError("zero has no divisor")
    seen = {}
    for part in (f.num, f.den):
        if not part.is_constant():
            _, factors = poly_factor(part)
            for irr, _ in factors:
                seen[irr] = Place.finite(irr)
    out = sorted(seen.values(), key=lambda v: (v.poly.degree, v.poly.coeffs))
    out.append(Place.infinite(f.p))
    return out


def func_height_via_places(f):
    """H(f) as the pole-degree sum over all places (cross-check path)."""
    if isinstance(f, Poly):
        f = RatFunc(f)
    if f.is_zero():
        return 0
    total = 0
    for v in places_of(f):
        val = valuation(f, v)
        if val < 0:
            total += v.residue_degree() * (-val)
    return total


# ---------------------------------------------------------------------------
# the perfect closure
# ---------------------------------------------------------------------------

class PerfElement:
    """rep**(1/p**level): an element of K^per, normalized to minimal level."""

    __slots__ = ("rep", "level")

    def __init__(self, rep, level=0):
        if level < 0:
            raise ValueError("level must be nonnegative")
        while level > 0:
            root = rep.pth_root()
            if root is None:
                break
            rep = root
            level -= 1
        if rep.is_zero():
            level = 0
        self.rep = rep
        self.level = level

    @property
    def p(self):
        return self.rep.p

    def is_zero(self):
        return self.rep.is_zero()

    def _binop(self, other, op):
        if not isinstance(other, PerfElement):
            other = PerfElement(self.rep._coerce(other))
        lv = max(self.level, other.level)
        a = self.rep.frobenius(lv - self.level)
        b = other.rep.frobenius(lv - other.level)
        return PerfElement(op(a, b), lv)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    def __truediv__(self, other):
        if isinstance(other, PerfElement) and other.is_zero():
            raise ZeroDivisionError("division by zero in K^per")
        return self._binop(other, lambda a, b: a / b)

    def __neg__(self):
        return PerfElement(-self.rep, self.level)

    def __pow__(self, n):
        if n < 0:
            return (PerfElement(RatFunc.one(self.p)) / self) ** (-n)
        result = PerfElement(RatFunc.one(self.p))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, PerfElement):
            return NotImplemented
        return self.level == other.level and self.rep == other.rep

    def __hash__(self):
        return hash((self.rep, self.level))

    def height(self):
        """H of the element as a point of the level-n tower field, K-normalized."""
        return Fraction(func_height(self.rep), self.p**self.level)

    def __repr__(self):
        if self.level == 0:
            return f"PerfElement({format_ratfunc(self.rep)!r})"
        return f"PerfElement({format_ratfunc(self.rep)!r} ^(1/{self.p}^{self.level}))"


def perf_arith(a, b, op):
    """Dispatch helper matching the wire-level operation names."""
    ops = {
        "add": lambda x, y: x + y,
        "sub": lambda x, y: x - y,
        "mul": lambda x, y: x * y,
        "div": lambda x, y: x / y,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](a, b)


# ---------------------------------------------------------------------------
# string grammar:  integers, t, + - * / ^, parentheses
# ---------------------------------------------------------------------------

def parse_ratfunc(p, text):
    """Parse the rational-function grammar into a RatFunc over F_p."""
    s = text
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def parse_expr():
        nonlocal pos
        val = parse_term()
        while True:
            skip_ws()
            if pos < len(s) and s[pos] in "+-":
                op = s[pos]
                pos += 1
                rhs = parse_term()
                val = val + rhs if op == "+" else val - rhs
            else:
                return val

    def parse_term():
        nonlocal pos
        val = parse_factor()
        while True:
            skip_ws()
            if pos < len(s) and s[pos] in "*/":
                op = s[pos]
                pos += 1
                rhs = parse_factor()
                if op == "/":
                    if rhs.is_zero():
                        raise ParseError("division by zero", pos)
                    val = val / rhs
                else:
                    val = val * rhs
            else:
                return val

    def parse_factor():
        nonlocal pos
        skip_ws()
        if pos < len(s) and s[pos] == "-":
            pos += 1
            return -parse_factor()
        base = parse_base()
        skip_ws()
        if pos < len(s) and s[pos] == "^":
            pos += 1
            skip_ws()
            start = pos
            neg = False
            if pos < len(s) and s[pos] == "-":
                neg = True
                pos += 1
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            if pos == start + (1 if neg else 0):
                raise ParseError("expected integer exponent after '^'", pos)
            n = int(s[start:pos])
            if n < 0 and base.is_zero():
                raise ParseError("zero to a negative power", start)
            return base**n
        return base

    def parse_base():
        nonlocal pos
        skip_ws()
        if pos >= len(s):
            raise ParseError("unexpected end of input", pos)
        ch = s[pos]
        if ch == "(":
            pos += 1
            val = parse_expr()
            skip_ws()
            if pos >= len(s) or s[pos] != ")":
                raise ParseError("expected ')'", pos)
            pos += 1
            return val
        if ch == "t":
            pos += 1
            return RatFunc.t(p)
        if ch.isdigit():
            start = pos
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            return RatFunc.const(p, int(s[start:pos]))
        raise ParseError(f"unexpected character {ch!r}", pos)

    val = parse_expr()
    skip_ws()
    if pos != len(s):
        raise ParseError(f"trailing input {s[pos:]!r}", pos)
    return val


def format_poly(f):
    if f.is_zero():
        return "0"
    terms = []
    for k in range(f.degree, -1, -1):
        c = f[k]
        if not c:
            continue
        if k == 0:
            terms.append(str(c))
        elif k == 1:
            terms.append("t" if c == 1 else f"{c}*t")
        else:
            terms.append(f"t^{k}" if c == 1 else f"{c}*t^{k}")
    return "+".join(terms)


def _term_count(f):
    return sum(1 for c in f.coeffs if c)


def format_ratfunc(f):
    if f.is_polynomial():
        return format_poly(f.num)
    num = format_poly(f.num)
    den = format_poly(f.den)
    if _term_count(f.num) > 1:
        num = f"({num})"
    if _term_count(f.den) > 1:
        den = f"({den})"
    return f"{num}/{den}"
