import random

import pytest

from kperec.fields import Poly, RatFunc
from kperec.curves import WeierstrassCurve, TowerPoint


def random_poly(rng, p, max_deg, nonzero=False):
    d = rng.randrange(max_deg + 1)
    cs = [rng.randrange(p) for _ in range(d + 1)]
    f = Poly(p, cs)
    if nonzero and f.is_zero():
        return Poly.one(p)
    return f


def random_ratfunc(rng, p, max_deg=3, nonzero=False):
    num = random_poly(rng, p, max_deg, nonzero=nonzero)
    den = random_poly(rng, p, max_deg, nonzero=True).monic()
    f = RatFunc(num, den)
    if nonzero and f.is_zero():
        return RatFunc.one(p)
    return f


def random_curves(rng, p, count, coeff_deg=2, short=False):
    """Nonsingular curves with small polynomial coefficients."""
    out = []
    while len(out) < count:
        if short and p != 2:
            coeffs = [RatFunc.zero(p), RatFunc.zero(p), RatFunc.zero(p),
                      RatFunc(random_poly(rng, p, coeff_deg)),
                      RatFunc(random_poly(rng, p, coeff_deg))]
        else:
            coeffs = [RatFunc(random_poly(rng, p, 1)) for _ in range(2)] + \
                     [RatFunc(random_poly(rng, p, coeff_deg)) for _ in range(3)]
        try:
            out.append(WeierstrassCurve(p, *coeffs))
        except ValueError:
            continue
    return out


def curve_with_point(p, a1, a2, a4, x_str="t", y_str="t"):
    """Curve through the planted point (x, y) with the given other coefficients."""
    from kperec.fields import parse_ratfunc

    x = parse_ratfunc(p, x_str)
    y = parse_ratfunc(p, y_str)
    a1 = parse_ratfunc(p, a1) if isinstance(a1, str) else RatFunc.const(p, a1)
    a2 = parse_ratfunc(p, a2) if isinstance(a2, str) else RatFunc.const(p, a2)
    a4 = parse_ratfunc(p, a4) if isinstance(a4, str) else RatFunc.const(p, a4)
    a6 = y * y + a1 * x * y - x ** 3 - a2 * x * x - a4 * x
    E = WeierstrassCurve(p, a1, a2, RatFunc.zero(p), a4, a6)
    P = TowerPoint(E, 0, (x, y))
    return E, P


@pytest.fixture
def rng():
    return random.Random(20240809)
