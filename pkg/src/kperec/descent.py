"""The tame-module descent engine and bounded-height point search.

descend() runs the coset-representative descent on any module exposing the
HeightModule operations; the elliptic instantiation enumerates points of
bounded naive height on a tower level and certifies generators with the
canonical height.  Representability of an element in a generator set is
decided by bounded coefficient search, which is exact for the lattice
instances shipped here and a documented heuristic reach in general.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, InputError, InvariantViolationError
from .fields import Place, Poly, RatFunc, format_ratfunc, monic_polys
from .curves import TowerPoint, frobenius_twist, scalar_mul
from .heights import canonical_height, duplication_height_bound, naive_height
from .torsion import lift_x, torsion_subgroup, is_torsion_point


class CosetCoverageError(InputError):
    """The supplied coset representatives fail to cover M/aM on a sample."""


# ---------------------------------------------------------------------------
# abstract height modules
# ---------------------------------------------------------------------------

class HeightModule:
    """Interface required by descend(); see IntegerLattice for the contract.

    Operations: zero(), add(x, y), neg(x), act(x) (multiplication by the
    fixed ring element a), height(x) -> Fraction, enumerate_up_to(D),
    torsion_elements().  Elements must be hashable and compare by value.
    """

    def zero(self):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def act(self, x):
        raise NotImplementedError

    def height(self, x):
        raise NotImplementedError

    def enumerate_up_to(self, D):
        raise NotImplementedError

    def torsion_elements(self):
        raise NotImplementedError

    def coefficient_bound(self, x, gens):
        """Search radius for representing x over gens (exactness is
        instance-specific; see module docstring)."""
        hx = self.height(x)
        hmin = min((self.height(g) for g in gens), default=Fraction(1))
        hmin = max(hmin, Fraction(1, 4))
        import math
        return max(4, math.isqrt(int(4 * hx / hmin)) + 2)


class IntegerLattice(HeightModule):
    """Z^dim with a fixed integer multiplier and an L1 or square height."""

    def __init__(self, dim, a, norm="l1"):
        if norm not in ("l1", "square"):
            raise ValueError("norm must be 'l1' or 'square'")
        if norm == "square" and dim != 1:
            raise ValueError("the square height is one-dimensional")
        self.dim = dim
        self.a = a
        self.norm = norm

    def zero(self):
        return (0,) * self.dim

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def act(self, x):
        return tuple(self.a * c for c in x)

    def height(self, x):
        if self.norm == "square":
            return Fraction(x[0] * x[0])
        return Fraction(sum(abs(c) for c in x))

    def enumerate_up_to(self, D):
        if self.norm == "square":
            import math
            r = math.isqrt(int(Fraction(D)))
            return [(c,) for c in range(-r, r + 1)]
        r = int(Fraction(D))
        out = []
        for combo in itertools.product(range(-r, r + 1), repeat=self.dim):
            if sum(abs(c) for c in combo) <= D:
                out.append(combo)
        return out

    def torsion_elements(self):
        return [self.zero()]

    def coefficient_bound(self, x, gens):
        return int(self.height(x)) + 2


class FiniteCyclicModule(HeightModule):
    """Z/n with the zero height: everything is torsion."""

    def __init__(self, n, a=2):
        self.n = n
        self.a = a

    def zero(self):
        return 0

    def add(self, x, y):
        return (x + y) % self.n

    def neg(self, x):
        return (-x) % self.n

    def act(self, x):
        return (self.a * x) % self.n

    def height(self, x):
        return Fraction(0)

    def enumerate_up_to(self, D):
        return list(range(self.n))

    def torsion_elements(self):
        return list(range(self.n))


# ---------------------------------------------------------------------------
# the descent engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DescentResult:
    rank: int
    free_generators: tuple
    torsion_generators: tuple
    search_bound: Fraction
    reps_used: int
    stabilized: bool | None = None
    level: int | None = None

    def to_json(self, serialize=str):
        out = {"rank": self.rank,
               "free_generators": [serialize(g) for g in self.free_generators],
               "torsion": [serialize(g) for g in self.torsion_generators],
               "search_bound": str(self.search_bound),
               "stabilized": self.stabilized}
        if self.level is not None:
            out["level"] = self.level
        return out


def _representable(M, x, gens, torsion, bound):
    """Whether x = sum c_i g_i + t with |c_i| <= bound and t torsion."""
    if x in torsion:
        return True
    if not gens:
        return False

    zero = M.zero()
    torsion_set = set(torsion)

    def rec(i, acc):
        if i == len(gens):
            # acc == x - sum(...): hit iff residual is torsion
            return M.add(x, M.neg(acc)) in torsion_set
        g = gens[i]
        neg_g = M.neg(g)
        cur = acc
        for c in range(0, bound + 1):
            if rec(i + 1, cur):
                return True
            if c < bound:
                cur = M.add(cur, g)
        cur = M.add(acc, neg_g)
        for c in range(1, bound + 1):
            if rec(i + 1, cur):
                return True
            if c < bound:
                cur = M.add(cur, neg_g)
        return False

    return rec(0, zero)


def descend(M, reps, check_reach=None):
    """Coset-representative descent: generators of the searched span.

    reps must cover M/aM; this is spot-checked on the enumerated ball (a
    failure raises CosetCoverageError).  Returns the span of the height-B
    ball, split as torsion + free generators, where B = max height(rep).
    """
    reps = list(reps)
    if not reps:
        raise InputError("need at least one coset representative")
    B = max(M.height(y) for y in reps)
    Z = list(M.enumerate_up_to(B))
    torsion = list(M.torsion_elements())
    torsion_set = set(torsion)

    # coverage check: every sampled z must differ from some rep by an
    # a-divisible element whose quotient the same ball reaches
    acted = {M.act(w) for w in Z}
    for z in Z:
        if not any(M.add(z, M.neg(y)) in acted for y in reps):
            raise CosetCoverageError(
                f"element {z!r} is not covered by the declared representatives")

    candidates = sorted((z for z in Z if z not in torsion_set),
                        key=lambda z: (M.height(z), repr(z)))
    gens = []
    for z in candidates:
        bound = M.coefficient_bound(z, gens)
        if not _representable(M, z, gens, torsion, bound):
            gens.append(z)

    for z in check_reach or []:
        bound = M.coefficient_bound(z, gens)
        if not _representable(M, z, gens, torsion, bound):
            raise InvariantViolationError(
                f"enumerated element {z!r} escapes the descended span")

    torsion_gens = _torsion_generators(M, torsion)
    return DescentResult(rank=len(gens), free_generators=tuple(gens),
                         torsion_generators=tuple(torsion_gens),
                         search_bound=Fraction(B), reps_used=len(reps))


def _torsion_generators(M, torsion):
    """A small generating set of the finite torsion list (greedy closure)."""
    zero = M.zero()
    have = {zero}
    gens = []
    for t in sorted((t for t in torsion if t != zero), key=repr):
        if t in have:
            continue
        gens.append(t)
        frontier = list(have)
        while frontier:
            fresh = []
            for a in frontier:
                b = M.add(a, t)
                while b not in have:
                    have.add(b)
                    fresh.append(b)
                    b = M.add(b, t)
            frontier = fresh
    return gens


# ---------------------------------------------------------------------------
# bounded-height enumeration on a tower level
# ---------------------------------------------------------------------------

_PREFILTER_MIN_CANDIDATES = 20_000


def bounded_height_points(E, level, D, budget=2_000_000, prefilter=True):
    """Every P in E(K^{1/p^level}) with naive height <= D, plus infinity.

    Enumerates twist x-candidates u/w with max(deg u, deg w) <= floor(p^level * D),
    coprime and w monic (a canonical representation, so no dedup pass), and
    solves the Weierstrass quadratic in y over K.  Large scans are first
    culled by checking that x reduces to the abscissa of a point over a few
    good residue fields (a pure filter: no point can be lost).
    """
    D = Fraction(D)
    if D < 0:
        raise ValueError("height bound must be nonnegative")
    p = E.p
    B = int(D * p**level)
    twist = frobenius_twist(E, level)
    n_numerators = p ** (B + 1)
    n_denominators = sum(p**d for d in range(B + 1))
    total = n_numerators * n_denominators
    if total > budget:
        raise BudgetExceededError(
            f"enumeration needs {total} candidates; budget is {budget}")

    points = [TowerPoint.infinity(E)]
    sieves = _x_residue_sieves(twist) if (prefilter and
                                          total >= _PREFILTER_MIN_CANDIDATES) else []
    numerators = list(_all_polys(p, B))
    masks_by_sieve = [s.numerator_codes(numerators, B) for s in sieves]
    for wdeg in range(B + 1):
        for w in monic_polys(p, wdeg):
            survivors = None
            for sieve, ucodes in zip(sieves, masks_by_sieve):
                mask = sieve.mask_for_denominator(w, ucodes)
                survivors = mask if survivors is None else (survivors & mask)
            idx = (range(len(numerators)) if survivors is None
                   else _np_nonzero(survivors))
            for i in idx:
                u = numerators[i]
                if u.gcd(w).degree > 0:
                    continue
                x = RatFunc(u, w, _reduced=True)
                for y in lift_x(twist, x):
                    points.append(TowerPoint(E, level, (x, y)))
    points.sort(key=_point_sort_key)
    return points


def _np_nonzero(mask):
    import numpy as np

    return np.nonzero(mask)[0].tolist()


class _XResidueSieve:
    """Vectorized test that u(theta)/w(theta) is a curve abscissa in F_q."""

    def __init__(self, finite_curve):
        import numpy as np

        self.fc = finite_curve
        k = finite_curve.k
        self.p = k.p
        self.deg = k.degree
        self.q = k.q
        elems = list(k.elements())
        code = {a: i for i, a in enumerate(elems)}
        self.mul = np.zeros((self.q, self.q), dtype=np.int32)
        self.add = np.zeros((self.q, self.q), dtype=np.int32)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                self.mul[i, j] = code[a * b]
                self.add[i, j] = code[a + b]
        self.inv = np.zeros(self.q, dtype=np.int32)
        for i, a in enumerate(elems[1:], start=1):
            self.inv[i] = code[a.inverse()]
        self.theta_code = code[k.gen()] if self.deg > 1 else None
        self.scalar_codes = np.array([code[k.from_int(c)] for c in range(self.p)],
                                     dtype=np.int32)
        good = np.zeros(self.q, dtype=bool)
        for i, a in enumerate(elems):
            good[i] = finite_curve.y_count(a) > 0
        self.good_x = good
        # code of t mod the place (the evaluation point for polynomials)
        self.t_code = code[k.element(Poly.t(self.p))]
        self.elems = elems
        self.code = code

    def poly_code(self, f):
        import numpy as np

        acc = 0  # code of zero is index of zero element, which is 0
        for c in reversed(f.coeffs):
            acc = self.add[self.mul[acc, self.t_code], self.scalar_codes[c]]
        return int(acc)

    def numerator_codes(self, numerators, B):
        import numpy as np

        del B
        codes = np.zeros(len(numerators), dtype=np.int32)
        for i, u in enumerate(numerators):
            codes[i] = self.poly_code(u)
        return codes

    def mask_for_denominator(self, w, ucodes):
        import numpy as np

        wc = self.poly_code(w)
        if wc == 0:
            # x reduces to infinity at this place: always a valid abscissa
            return np.ones(len(ucodes), dtype=bool)
        xres = self.mul[ucodes, self.inv[wc]]
        return self.good_x[xres]


def _x_residue_sieves(twist, count=2, max_q=2500):
    from .errors import InputError as _InputError
    from .torsion import FiniteCurve, BadReductionError
    from .fields import monic_irreducibles

    sieves = []
    for pi in monic_irreducibles(twist.p, 3):
        if twist.p ** pi.degree > max_q:
            break
        try:
            fc = FiniteCurve(twist, Place.finite(pi))
        except (BadReductionError, _InputError):
            continue
        if fc.q < 2 * twist.p:
            continue  # too coarse to reject anything useful
        sieves.append(_XResidueSieve(fc))
        if len(sieves) == count:
            break
    return sieves


def _all_polys(p, max_degree):
    yield Poly.zero(p)
    for d in range(max_degree + 1):
        total = p**d
        for lead in range(1, p):
            for n in range(total):
                cs = []
                m = n
                for _ in range(d):
                    cs.append(m % p)
                    m //= p
                cs.append(lead)
                yield Poly(p, cs)


def _point_sort_key(P):
    if P.is_infinity:
        return (Fraction(0), -1, "", "")
    return (naive_height(P), P.level, format_ratfunc(P.x), format_ratfunc(P.y))


# ---------------------------------------------------------------------------
# elliptic instantiation and generators across the tower
# ---------------------------------------------------------------------------

class EllipticModule(HeightModule):
    """E(K^{1/p^level}) with the canonical height and enumeration by naive height."""

    def __init__(self, E, level=0, eps=Fraction(1, 10**4), budget=2_000_000,
                 extra_points=()):
        self.E = E
        self.level = level
        self.eps = Fraction(eps)
        self.budget = budget
        self.extra_points = tuple(extra_points)
        self._height_cache = {}
        self._torsion = None

    def zero(self):
        return TowerPoint.infinity(self.E)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def act(self, x):
        return scalar_mul(self.E.p, x)

    def height_with_error(self, x):
        got = self._height_cache.get(x)
        if got is None:
            got = canonical_height(x, self.eps)
            self._height_cache[x] = got
        return got

    def height(self, x):
        return self.height_with_error(x)[0]

    def enumerate_up_to(self, D):
        """Points with certified canonical height possibly <= D."""
        D = Fraction(D)
        naive_cap = 2 * D + duplication_height_bound(self.E)
        pts = bounded_height_points(self.E, self.level, naive_cap, self.budget)
        pts.extend(P for P in self.extra_points if P.level <= self.level)
        out = []
        seen = set()
        for P in pts:
            if P in seen:
                continue
            seen.add(P)
            value, err = self.height_with_error(P)
            if value - err <= D:
                out.append(P)
        return out

    def torsion_elements(self):
        if self._torsion is None:
            from .torsion import _group_closure

            group = torsion_subgroup(frobenius_twist(self.E, self.level))
            seed = {TowerPoint.infinity(self.E)}
            seed.update(TowerPoint(self.E, self.level, (g.x, g.y))
                        for g in group.generators if not g.is_infinity)
            self._torsion = sorted(_group_closure(seed), key=_point_sort_key)
        return self._torsion


@dataclass(frozen=True)
class TowerDescentReport:
    levels: tuple          # DescentResult per level 0..max_level
    stabilized_at: int | None
    rank_sequence: tuple

    def to_json(self):
        return {"levels": [r.to_json(lambda P: P.to_json()) for r in self.levels],
                "stabilized_at": self.stabilized_at,
                "rank_sequence": list(self.rank_sequence)}


def perfect_closure_generators(E, max_level, search_bound, eps=Fraction(1, 10**4),
                               budget=2_000_000, extra_points=()):
    """Generators of the searched subgroups G_n of E(K^{1/p^n}), n <= max_level.

    Outputs are certified generators of the subgroup reachable within
    search_bound, with an observational stabilization flag; they are not a
    certified basis of E(K^per) (no effective coset representatives exist).
    """
    if max_level < 0:
        raise ValueError("max_level must be nonnegative")
    search_bound = Fraction(search_bound)
    if search_bound <= 0:
        raise ValueError("search_bound must be positive")
    p = E.p
    results = []
    gens_by_level = []
    for n in range(max_level + 1):
        module = EllipticModule(E, n, eps=eps, budget=budget,
                                extra_points=extra_points)
        pts = bounded_height_points(E, n, search_bound, budget)
        pts.extend(P for P in extra_points if P.level <= n)
        torsion = module.torsion_elements()
        torsion_set = set(torsion)
        free = []
        for P in sorted(set(pts), key=_point_sort_key):
            if P in torsion_set or P.is_infinity:
                continue
            if is_torsion_point(P):
                continue
            bound = module.coefficient_bound(P, free)
            if not _representable(module, P, free, torsion, bound):
                free.append(P)

        for P in free:
            img = scalar_mul(p**P.level, P)
            if img.level != 0:
                raise InvariantViolationError(
                    "p^n * (level-n point) failed to land in E(K)")

        # rank bound through the p-division hull: the images p^l g generate a
        # subgroup of E(K) of rank equal to rank(G_n)
        if n > 0:
            base_module = EllipticModule(E, 0, eps=eps, budget=budget)
            base_gens = list(gens_by_level[0])
            combined = list(base_gens)
            base_torsion = base_module.torsion_elements()
            for P in free:
                img = scalar_mul(p**P.level, P)
                bound = base_module.coefficient_bound(img, combined)
                if not img.is_infinity and not _representable(
                        base_module, img, combined, base_torsion, bound):
                    combined.append(img)
            if len(free) > len(combined):
                raise InvariantViolationError(
                    "rank at level exceeded its p-division-hull bound")

        torsion_gens = _torsion_generators(module, torsion)
        stabilized = None
        if n > 0:
            stabilized = _same_generators(module, gens_by_level[-1], free,
                                          torsion, torsion_set)
        results.append(DescentResult(rank=len(free), free_generators=tuple(free),
                                     torsion_generators=tuple(torsion_gens),
                                     search_bound=search_bound,
                                     reps_used=0, stabilized=stabilized, level=n))
        gens_by_level.append(free)

    stabilized_at = None
    for n in range(1, max_level + 1):
        if results[n].stabilized and all(results[m].stabilized
                                         for m in range(n, max_level + 1)):
            stabilized_at = n - 1
            break
    return TowerDescentReport(tuple(results), stabilized_at,
                              tuple(r.rank for r in results))


def _same_generators(module, prev, cur, torsion, torsion_set):
    if len(prev) != len(cur):
        return False
    for P in cur:
        bound = module.coefficient_bound(P, prev)
        if not _representable(module, P, prev, torsion, bound):
            return False
    return True
