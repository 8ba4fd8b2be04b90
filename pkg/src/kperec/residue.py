"""Residue fields F_p[t]/(pi) and generic polynomial arithmetic over a field.

Tate's algorithm needs root-finding for quadratics and cubics over the
residue field at each place, in every characteristic.  FPoly provides the
polynomial layer over an arbitrary coefficient field (residue fields here,
K itself elsewhere for resultants and division polynomials).
"""

from __future__ import annotations

import random

from .fields import Poly, RatFunc, poly_ord


class FqElem:
    """Element of F_q = F_p[t]/(pi), stored as the reduced representative."""

    __slots__ = ("field", "rep")

    def __init__(self, field, rep):
        self.field = field
        self.rep = rep % field.modulus if rep.degree >= field.modulus.degree else rep

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different residue fields")
            return other
        if isinstance(other, int):
            return FqElem(self.field, Poly.const(self.field.p, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.field, self.rep + other.rep)

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.field, -self.rep)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.field, self.rep - other.rep)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.field, (self.rep * other.rep) % self.field.modulus)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return FqElem(self.field, self.rep.pow_mod(n, self.field.modulus))

    def inverse(self):
        if self.rep.is_zero():
            raise ZeroDivisionError("inverse of 0 in residue field")
        g, u, _ = self.rep.xgcd(self.field.modulus)
        if not g.is_one():
            raise ArithmeticError("modulus not irreducible")
        return FqElem(self.field, u % self.field.modulus)

    def __bool__(self):
        return not self.rep.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        return hash((self.field.modulus, self.rep))

    def is_square(self):
        q = self.field.q
        if q % 2 == 0 or not self:
            return True
        return self ** ((q - 1) // 2) == self.field.one()

    def sqrt(self):
        """A square root in F_q, or None."""
        fld = self.field
        q = fld.q
        if not self:
            return self
        if q % 2 == 0:
            return self ** (q // 2)
        if not self.is_square():
            return None
        # Tonelli-Shanks over F_q
        m, s = q - 1, 0
        while m % 2 == 0:
            m //= 2
            s += 1
        z = fld.non_square()
        c = z**m
        x = self ** ((m + 1) // 2)
        r = self**m
        while r != fld.one():
            k, sq = 0, r
            while sq != fld.one():
                sq = sq * sq
                k += 1
            b = c ** (1 << (s - k - 1))
            x = x * b
            c = b * b
            r = r * c
            s = k
        return x

    def pth_root(self):
        """The unique p-th root (Frobenius is bijective on F_q)."""
        fld = self.field
        return self ** (fld.p ** (fld.degree - 1)) if fld.degree > 1 else self

    def cbrt(self):
        """A cube root when p = 3 (unique since Frobenius is cubing)."""
        if self.field.p != 3:
            raise ValueError("cbrt shortcut only valid in characteristic 3")
        return self.pth_root()

    def __repr__(self):
        return f"FqElem({self.rep})"


class ResidueField:
    """F_q = F_p[t]/(pi) for a finite place with monic irreducible pi."""

    def __init__(self, modulus):
        self.modulus = modulus
        self.p = modulus.p
        self.degree = modulus.degree
        self.q = self.p**self.degree
        self.char = self.p

    def zero(self):
        return FqElem(self, Poly.zero(self.p))

    def one(self):
        return FqElem(self, Poly.one(self.p))

    def from_int(self, n):
        return FqElem(self, Poly.const(self.p, n))

    def gen(self):
        return FqElem(self, Poly.t(self.p))

    def element(self, poly):
        return FqElem(self, poly % self.modulus)

    def elements(self):
        """All q elements, ordered by (degree, lex) of representatives."""
        p, k = self.p, self.degree
        for n in range(self.q):
            cs = []
            m = n
            for _ in range(k):
                cs.append(m % p)
                m //= p
            yield FqElem(self, Poly(p, cs))

    def non_square(self):
        for a in self.elements():
            if a and not a.is_square():
                return a
        raise ArithmeticError("no non-square found (q even?)")

    def reduce(self, f):
        """Image of a v-integral f in K; raises on a pole at this place."""
        if isinstance(f, Poly):
            f = RatFunc(f)
        if f.is_zero():
            return self.zero()
        dn = f.den % self.modulus
        if dn.is_zero():
            if (f.num % self.modulus).is_zero():
                raise ValueError("indeterminate reduction; cancel first")
            raise ZeroDivisionError("pole at this place")
        return self.element(f.num) / self.element(dn)

    def lift(self, a):
        """The canonical representative of a as an element of K."""
        return RatFunc(a.rep)

    def __eq__(self, other):
        return isinstance(other, ResidueField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("ResidueField", self.modulus))

    def __repr__(self):
        return f"ResidueField(F_{self.p}[t]/({self.modulus}))"


class KField:
    """Field handle for K = F_p(t), so FPoly can run over K itself."""

    def __init__(self, p):
        self.p = p
        self.char = p

    def zero(self):
        return RatFunc.zero(self.p)

    def one(self):
        return RatFunc.one(self.p)

    def from_int(self, n):
        return RatFunc.const(self.p, n)

    def __eq__(self, other):
        return isinstance(other, KField) and other.p == self.p

    def __hash__(self):
        return hash(("KField", self.p))


class FPoly:
    """Polynomial over an arbitrary field handle (coefficients index = power)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = cs

    @staticmethod
    def zero(field):
        return FPoly(field, [])

    @staticmethod
    def one(field):
        return FPoly(field, [field.one()])

    @staticmethod
    def x(field):
        return FPoly(field, [field.zero(), field.one()])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return len(self.coeffs) <= 1

    def lc(self):
        return self.coeffs[-1]

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero()

    def __eq__(self, other):
        return isinstance(other, FPoly) and self.coeffs == other.coeffs

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, bi in enumerate(b):
            out[i] = out[i] + bi
        return FPoly(self.field, out)

    def __neg__(self):
        return FPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FPoly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return FPoly.zero(self.field)
            zero = self.field.zero()
            out = [zero] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] = out[i + j] + ai * bj
            return FPoly(self.field, out)
        return FPoly(self.field, [c * other for c in self.coeffs])

    def scale(self, c):
        return FPoly(self.field, [a * c for a in self.coeffs])

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        fld = self.field
        if self.degree < other.degree:
            return FPoly.zero(fld), self
        inv = fld.one() / other.lc()
        r = list(self.coeffs)
        d = other.coeffs
        dd = len(d) - 1
        q = [fld.zero()] * (len(r) - dd)
        for i in range(len(r) - 1 - dd, -1, -1):
            c = r[i + dd]
            if c:
                c = c * inv
                q[i] = c
                for j, dj in enumerate(d):
                    r[i + j] = r[i + j] - c * dj
        return FPoly(fld, q), FPoly(fld, r[:dd])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.one() / self.lc())

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other):
        fld = self.field
        a, b = self, other
        u0, v0 = FPoly.one(fld), FPoly.zero(fld)
        u1, v1 = FPoly.zero(fld), FPoly.one(fld)
        while not b.is_zero():
            q, r = a.divmod(b)
            a, b = b, r
            u0, u1 = u1, u0 - q * u1
            v0, v1 = v1, v0 - q * v1
        if a.is_zero():
            return a, u0, v0
        inv = fld.one() / a.lc()
        return a.monic(), u0.scale(inv), v0.scale(inv)

    def pow_mod(self, n, modulus):
        result = FPoly.one(self.field)
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def derivative(self):
        fld = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            c = self.coeffs[i]
            acc = fld.zero()
            for _ in range(i % fld.char if fld.char else i):
                acc = acc + c
            out.append(acc)
        return FPoly(fld, out)

    def __call__(self, x):
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"FPoly({self.coeffs!r})"


def fq_roots(f):
    """All roots in F_q of an FPoly over a ResidueField, with deterministic splitting."""
    fld = f.field
    if f.is_zero():
        raise ValueError("every element is a root of 0")
    if f.degree < 1:
        return []
    q = fld.q

    # peel p-th powers (f = r^p has the same roots as r); the gcd with
    # x^q - x below is squarefree and keeps every root regardless of
    # multiplicity, so no further squarefree step is needed
    while True:
        d = f.derivative()
        if not d.is_zero() or f.degree < 1:
            break
        root_coeffs = [f.coeffs[i].pth_root() for i in range(0, len(f.coeffs), fld.p)]
        f = FPoly(fld, root_coeffs)
    if f.degree < 1:
        return []
    f = f.monic()

    x = FPoly.x(fld)
    xq = x.pow_mod(q, f)
    g = f.gcd(xq - x)

    roots = []
    rng = random.Random(0xC0FFEE ^ q)

    def split(h):
        if h.degree == 0:
            return
        if h.degree == 1:
            roots.append(-h.coeffs[0] / h.coeffs[1])
            return
        while True:
            r = FPoly(fld, [_rand_elem(fld, rng) for _ in range(h.degree)] + [fld.one()])
            if q % 2 == 1:
                w = r.pow_mod((q - 1) // 2, h) - FPoly.one(fld)
            else:
                # trace map F_q -> F_2 applied to r mod h
                w = r % h
                acc = w
                k = q.bit_length() - 1
                for _ in range(k - 1):
                    w = w.pow_mod(2, h)
                    acc = acc + w
                w = acc
            d = h.gcd(w)
            if 0 < d.degree < h.degree:
                split(d)
                split(h // d)
                return

    split(g)
    roots.sort(key=lambda a: (a.rep.degree, a.rep.coeffs))
    return roots


def _rand_elem(fld, rng):
    return FqElem(fld, Poly(fld.p, [rng.randrange(fld.p) for _ in range(fld.degree)]))


def ratfunc_poly_roots(field, coeffs, max_height=None):
    """Roots in K of a polynomial with RatFunc coefficients.

    Uses the rational-root theorem over the UFD F_p[t]: clear denominators,
    then candidates u/w run over unit multiples of monic divisors of the
    trailing and leading coefficients.  max_height prunes candidates by
    max(deg u, deg w) when the caller knows a bound on the roots sought.
    A residue-field evaluation sieve culls candidates before the exact test.
    """
    f = FPoly(field, coeffs)
    if f.is_zero():
        raise ValueError("zero polynomial")
    p = field.p
    roots = []
    # strip x = 0 roots
    shift = 0
    while not f.is_zero() and f.degree >= 0 and not f.coeffs[0]:
        f = FPoly(field, f.coeffs[1:])
        shift += 1
    if shift:
        roots.append(RatFunc.zero(p))
    if f.degree < 1:
        return roots

    den = Poly.one(p)
    for c in f.coeffs:
        den = den * (c.den // c.den.gcd(den)) if not c.den.is_one() else den
    cleared = [c.num * (den // c.den) for c in f.coeffs]
    d = len(cleared) - 1

    lead, trail = cleared[-1], cleared[0]
    lead_divs = _monic_divisors(lead, max_height)
    trail_divs = _monic_divisors(trail, max_height)

    sieve = _RootSieve(p, cleared)
    seen = set()
    for w in lead_divs:
        w_pows = _power_table(w, d)
        for u in trail_divs:
            if u.gcd(w).degree > 0:
                continue
            for unit in range(1, p):
                un = Poly.const(p, unit) * u
                key = (un.coeffs, w.coeffs)
                if key in seen:
                    continue
                seen.add(key)
                if not sieve.maybe_root(un, w):
                    continue
                u_pows = _power_table(un, d)
                acc = Poly.zero(p)
                for i, ci in enumerate(cleared):
                    if not ci.is_zero():
                        acc = acc + ci * u_pows[i] * w_pows[d - i]
                if acc.is_zero():
                    roots.append(RatFunc(un, w))
    roots.sort(key=lambda r: (func_height_key(r), r.num.coeffs, r.den.coeffs))
    return roots


def _power_table(f, d):
    out = [Poly.one(f.p)]
    for _ in range(d):
        out.append(out[-1] * f)
    return out


class _RootSieve:
    """Evaluation of the cleared polynomial in a couple of small residue
    fields; a candidate surviving all evaluations is tested exactly."""

    def __init__(self, p, cleared):
        from .fields import monic_irreducibles

        self.tests = []
        degree_wanted = 2 if p <= 13 else 1
        mods = []
        for pi in monic_irreducibles(p, degree_wanted):
            if pi.degree == degree_wanted:
                mods.append(pi)
            if len(mods) == 2:
                break
        for pi in mods:
            k = ResidueField(pi)
            red = [k.element(c % pi) for c in cleared]
            self.tests.append((k, red))

    def maybe_root(self, u, w):
        for k, red in self.tests:
            ub = k.element(u % k.modulus)
            wb = k.element(w % k.modulus)
            d = len(red) - 1
            upows = [k.one()]
            for _ in range(d):
                upows.append(upows[-1] * ub)
            val = k.zero()
            wpow = k.one()
            for i in range(d, -1, -1):
                val = val + red[i] * upows[i] * wpow
                wpow = wpow * wb
            if val:
                return False
        return True


def _monic_divisors(f, max_degree=None):
    from .fields import poly_factor

    _, factors = poly_factor(f)
    divs = [Poly.one(f.p)]
    for irr, mult in factors:
        new = []
        power = Poly.one(f.p)
        for e in range(mult + 1):
            for base in divs:
                cand = base * power
                if max_degree is None or cand.degree <= max_degree:
                    new.append(cand)
            if e < mult:
                power = power * irr
        divs = new
    return divs


def func_height_key(r):
    return max(r.num.degree if r.num.coeffs else -1, r.den.degree)
