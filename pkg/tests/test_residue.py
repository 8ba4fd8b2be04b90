import pytest

from kperec.fields import Poly, RatFunc, parse_ratfunc
from kperec.residue import (FPoly, KField, ResidueField, fq_roots,
                            ratfunc_poly_roots)


def _field(p, s):
    return ResidueField(parse_ratfunc(p, s).num)


def test_fq_basic_arithmetic():
    k = _field(3, "t^2+1")
    a = k.gen()
    assert a * a == k.from_int(-1)
    assert (a + 1) - 1 == a
    assert a * a.inverse() == k.one()
    assert k.q == 9


@pytest.mark.parametrize("mod,p", [("t^2+1", 3), ("t^2+t+1", 2), ("t^3+t+1", 2),
                                   ("t^2+2", 5)])
def test_fq_sqrt_everywhere(mod, p):
    k = _field(p, mod)
    squares = 0
    for a in k.elements():
        r = a.sqrt()
        if r is not None:
            assert r * r == a
            squares += 1
    if p == 2:
        assert squares == k.q  # Frobenius is bijective
    else:
        assert squares == (k.q + 1) // 2


def test_fq_pth_root():
    k = _field(3, "t^2+1")
    for a in k.elements():
        assert a.pth_root() ** 3 == a
    k2 = _field(3, "t^3+2*t+1")
    g = k2.gen()
    assert g.cbrt() ** 3 == g


def test_fq_roots_match_bruteforce():
    k = _field(3, "t^2+1")
    x = FPoly.x(k)
    # (x - g)(x - 2)(x^2 + ...) style products
    g = k.gen()
    f = (x - FPoly(k, [g])) * (x - FPoly(k, [k.from_int(2)])) * (x - FPoly(k, [g]))
    roots = fq_roots(f)
    brute = [a for a in k.elements() if not f(a)]
    assert sorted(roots, key=lambda a: (a.rep.degree, a.rep.coeffs)) == \
        sorted(brute, key=lambda a: (a.rep.degree, a.rep.coeffs))


@pytest.mark.parametrize("mod,p", [("t^2+t+1", 2), ("t^3+t+1", 2), ("t^2+2", 5)])
def test_fq_roots_random(mod, p, rng):
    k = _field(p, mod)
    elems = list(k.elements())
    for _ in range(10):
        chosen = [elems[rng.randrange(len(elems))] for _ in range(3)]
        f = FPoly.one(k)
        for c in chosen:
            f = f * (FPoly.x(k) - FPoly(k, [c]))
        roots = fq_roots(f)
        assert set(roots) == set(chosen)


def test_fq_roots_agree_with_scan():
    k = _field(3, "t^2+1")
    g = FPoly(k, [k.gen(), k.zero(), k.zero(), k.one()])  # x^3 + t
    roots = fq_roots(g)
    brute = [a for a in k.elements() if not g(a)]
    assert set(roots) == set(brute)


def test_fq_roots_repeated_p_power_multiplicity():
    # x^2 (x + g) over F_4: the double root must not be lost in char 2
    k = _field(2, "t^2+t+1")
    g = k.gen()
    f = FPoly(k, [k.zero(), k.zero(), g, k.one()])
    assert set(fq_roots(f)) == {k.zero(), g}


def test_ratfunc_poly_roots():
    p = 5
    K = KField(p)
    t = RatFunc.t(p)
    # (X - t)(X - (t+1)/t) * (irreducible quadratic)
    r1, r2 = t, (t + 1) / t
    f = [r1 * r2, -(r1 + r2), RatFunc.one(p)]
    # multiply by X^2 + t (no rational roots)
    poly = FPoly(K, f) * FPoly(K, [t, RatFunc.zero(p), RatFunc.one(p)])
    roots = ratfunc_poly_roots(K, poly.coeffs)
    assert set(roots) == {r1, r2}


def test_ratfunc_poly_roots_with_zero_root():
    p = 3
    K = KField(p)
    t = RatFunc.t(p)
    poly = [RatFunc.zero(p), -t, RatFunc.one(p)]  # X(X - t)... coeffs of X^2 - tX
    roots = ratfunc_poly_roots(K, poly)
    assert set(roots) == {RatFunc.zero(p), t}
