import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from kperec.fields import (NEG_INF, ParseError, PerfElement, Place, Poly,
                           RatFunc, format_ratfunc, func_height,
                           func_height_via_places, is_irreducible,
                           monic_irreducibles, parse_ratfunc, perf_arith,
                           places_of, poly_factor, pth_root, residue_degree,
                           valuation)

from conftest import random_poly, random_ratfunc


def P(p, s):
    f = parse_ratfunc(p, s)
    assert f.is_polynomial()
    return f.num


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------

def test_factor_irreducible_quadratic_over_f3():
    lead, factors = poly_factor(P(3, "t^2+1"))
    assert lead == 1
    assert factors == [(P(3, "t^2+1"), 1)]
    assert is_irreducible(P(3, "t^2+1"))


def test_factor_split_cubic_over_f5():
    lead, factors = poly_factor(P(5, "t^3+t"))
    assert lead == 1
    assert factors == [(P(5, "t"), 1), (P(5, "t+2"), 1), (P(5, "t+3"), 1)]


def test_factor_frobenius_power_over_f5():
    lead, factors = poly_factor(P(5, "t^5+2"))
    assert lead == 1
    assert factors == [(P(5, "t+2"), 5)]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_factor_round_trip_random(p, rng):
    for _ in range(25):
        f = random_poly(rng, p, 8, nonzero=True)
        lead, factors = poly_factor(f)
        prod = Poly.const(p, lead)
        for irr, e in factors:
            assert is_irreducible(irr)
            assert irr.is_monic()
            prod = prod * irr**e
        assert prod == f


def test_zero_factor_rejected():
    with pytest.raises(ValueError):
        poly_factor(Poly.zero(5))


# ---------------------------------------------------------------------------
# places and valuations
# ---------------------------------------------------------------------------

def test_valuation_examples():
    p = 3
    t = RatFunc.t(p)
    inf = Place.infinite(p)
    assert valuation(t, inf) == -1
    v_t = Place.finite(Poly.t(p))
    f = parse_ratfunc(p, "t^2/(t+1)")
    assert valuation(f, v_t) == 2
    assert valuation(RatFunc.zero(p), v_t) == math.inf


def test_valuation_product_formula_worked_example():
    f = parse_ratfunc(3, "(t^2+1)/t")
    pl = places_of(f)
    vals = {v.serialize(): valuation(f, v) for v in pl}
    assert vals == {"t^2+1": 1, "t": -1, "inf": -1}
    assert sum(v.residue_degree() * valuation(f, v) for v in pl) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_product_formula_random(p, rng):
    for _ in range(20):
        f = random_ratfunc(rng, p, 4, nonzero=True)
        total = sum(v.residue_degree() * valuation(f, v) for v in places_of(f))
        assert total == 0


def test_valuation_additive(rng):
    p = 5
    for _ in range(20):
        f = random_ratfunc(rng, p, 3, nonzero=True)
        g = random_ratfunc(rng, p, 3, nonzero=True)
        for v in places_of(f) + places_of(g):
            assert valuation(f * g, v) == valuation(f, v) + valuation(g, v)


def test_residue_degree():
    assert residue_degree(Place.finite(Poly.t(5))) == 1
    assert residue_degree(Place.infinite(5)) == 1
    assert residue_degree(Place.finite(P(3, "t^2+1"))) == 2


def test_place_requires_irreducible():
    with pytest.raises(ValueError):
        Place.finite(P(5, "t^2"))


# ---------------------------------------------------------------------------
# heights of functions
# ---------------------------------------------------------------------------

def test_func_height_examples():
    assert func_height(parse_ratfunc(5, "t")) == 1
    assert func_height(parse_ratfunc(5, "(t^2+1)/t")) == 2
    f = parse_ratfunc(5, "t^4+t^2")
    assert func_height(f) == 4
    assert func_height_via_places(f) == 4


@pytest.mark.parametrize("p", [2, 3, 5])
def test_func_height_properties(p, rng):
    for _ in range(20):
        f = random_ratfunc(rng, p, 3, nonzero=True)
        g = random_ratfunc(rng, p, 3, nonzero=True)
        assert func_height(f * g) <= func_height(f) + func_height(g)
        assert func_height(f + g) <= func_height(f) + func_height(g)
        assert func_height(f**p) == p * func_height(f)
        assert func_height(f) == func_height_via_places(f)


# ---------------------------------------------------------------------------
# p-th roots and the perfect closure
# ---------------------------------------------------------------------------

def test_pth_root_examples():
    assert pth_root(parse_ratfunc(5, "t^5+2")) == parse_ratfunc(5, "t+2")
    assert pth_root(parse_ratfunc(5, "t")) is None
    assert pth_root(parse_ratfunc(5, "t^5")) == parse_ratfunc(5, "t")


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pth_root_inverts_frobenius(p, rng):
    for _ in range(20):
        f = random_ratfunc(rng, p, 3)
        assert pth_root(f.frobenius()) == f


def test_perf_element_mul():
    p = 5
    t = RatFunc.t(p)
    a = PerfElement(t, 1)
    prod = a * a
    assert prod == PerfElement(t * t, 1)


def test_perf_element_power_collapses_level():
    p = 5
    a = PerfElement(RatFunc.t(p), 1)
    assert a**p == PerfElement(RatFunc.t(p), 0)


def test_perf_element_add_example():
    p = 5
    t = RatFunc.t(p)
    a = PerfElement(t, 1)
    b = PerfElement(t**5, 1)
    s = perf_arith(a, b, "add")
    assert s.level == 1 and s.rep == t + t**5


def test_perf_element_normalization_idempotent(rng):
    p = 3
    for _ in range(20):
        f = random_ratfunc(rng, p, 3, nonzero=True)
        n = rng.randrange(3)
        a = PerfElement(f.frobenius(n), n + rng.randrange(2))
        b = PerfElement(a.rep, a.level)
        assert a == b
        assert a.level == 0 or a.rep.pth_root() is None


def test_perf_element_division_by_zero():
    p = 3
    with pytest.raises(ZeroDivisionError):
        perf_arith(PerfElement(RatFunc.t(p)), PerfElement(RatFunc.zero(p)), "div")


@given(st.integers(0, 3 ** 5 - 1), st.integers(0, 2), st.integers(0, 2))
@settings(max_examples=60, deadline=None)
def test_perf_field_laws(code, la, lb):
    p = 3
    cs = []
    for _ in range(5):
        cs.append(code % p)
        code //= p
    f = Poly(p, cs[:3])
    g = Poly(p, cs[2:])
    a = PerfElement(RatFunc(f), la)
    b = PerfElement(RatFunc(g), lb)
    assert (a + b) - b == a
    if not b.is_zero():
        assert (a * b) / b == a


# ---------------------------------------------------------------------------
# the string grammar
# ---------------------------------------------------------------------------

def test_parse_round_trip(rng):
    for p in (2, 3, 5, 97):
        for _ in range(25):
            f = random_ratfunc(rng, p, 4)
            assert parse_ratfunc(p, format_ratfunc(f)) == f


def test_parse_spec_example():
    f = parse_ratfunc(5, "(t^3+2*t)/(t+1)")
    assert format_ratfunc(f) == "(t^3+2*t)/(t+1)"


def test_parse_coefficients_reduced_mod_p():
    assert parse_ratfunc(5, "7*t") == parse_ratfunc(5, "2*t")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse_ratfunc(5, "t^2 + %")
    assert exc.value.pos == 6


def test_parse_unbalanced_parens():
    with pytest.raises(ParseError):
        parse_ratfunc(5, "(t+1")


def test_deg_zero_sentinel():
    assert Poly.zero(5).degree == NEG_INF
    assert Poly.zero(5).degree < 0


def test_place_serialization_round_trip():
    for s in ("inf", "t", "t^2+1"):
        pl = Place.parse(3, s)
        assert pl.serialize() == s


def test_monic_irreducibles_order():
    first = []
    for f in monic_irreducibles(2, 2):
        first.append(format_ratfunc(RatFunc(f)))
        if len(first) == 3:
            break
    assert first == ["t", "t+1", "t^2+t+1"]
