import pytest

from kperec.fields import Poly, RatFunc, parse_ratfunc
from kperec.curves import (SingularCurveError, TowerPoint, WeierstrassCurve,
                           add, frobenius_inverse, frobenius_map,
                           frobenius_twist, is_isotrivial, scalar_mul,
                           verschiebung)
from kperec.heights import _duplication_bound

from conftest import random_curves, curve_with_point


def E1(p=5):
    return WeierstrassCurve(p, "0", "0", "0", "1", "t^2-t^3-t")


def _small_points(E, rng, count=6):
    """Points for law tests: the planted (t, t) and small multiples/sums."""
    P = TowerPoint.affine(E, "t", "t")
    pts = [P, -P, scalar_mul(2, P), scalar_mul(3, P), -scalar_mul(2, P),
           TowerPoint.infinity(E)]
    return pts[:count]


# ---------------------------------------------------------------------------
# construction and invariants
# ---------------------------------------------------------------------------

def test_disc_worked_examples():
    E = WeierstrassCurve(5, 0, 0, 0, 1, 0)
    assert E.disc == RatFunc.const(5, 1)          # -64 mod 5
    assert E.j == RatFunc.const(5, 3)             # 1728 mod 5
    E2 = WeierstrassCurve(5, "0", "0", "0", "1", "t")
    assert E2.disc == parse_ratfunc(5, "3*t^2+1")  # -16(4 + 27 t^2)
    E3 = WeierstrassCurve(5, "0", "0", "0", "0", "t^2")
    assert E3.disc == parse_ratfunc(5, "3*t^4")    # -432 t^4


def test_singular_rejected():
    with pytest.raises(SingularCurveError):
        WeierstrassCurve(5, 0, 0, 0, 0, 0)
    with pytest.raises(SingularCurveError):
        WeierstrassCurve(5, "0", "0", "0", "-3*t^2", "2*t^3")  # y^2 = (x-t)^2(x+2t)


def test_is_isotrivial():
    assert is_isotrivial(WeierstrassCurve(5, 0, 0, 0, 1, 0))
    assert not is_isotrivial(WeierstrassCurve(5, "0", "0", "0", "1", "t"))
    assert is_isotrivial(WeierstrassCurve(5, "0", "0", "0", "(t^3+t)^2", "0"))


def test_curve_json_round_trip():
    E = WeierstrassCurve(5, "t", "0", "1", "1/(t+1)", "t^2")
    assert WeierstrassCurve.from_json(E.to_json()) == E


# ---------------------------------------------------------------------------
# the group law
# ---------------------------------------------------------------------------

def test_identity_and_inverse():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    O = TowerPoint.infinity(E)
    assert P + O == P
    assert O + P == P
    assert P + (-P) == O
    assert (-P).y == -P.y - E.a1 * P.x - E.a3


def test_two_torsion_doubles_to_infinity():
    E = WeierstrassCurve(5, 0, 0, 0, 1, 0)
    P = TowerPoint.affine(E, "0", "0")
    assert scalar_mul(2, P).is_infinity


def test_duplication_matches_formula():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    Q = P + P
    expected_x = parse_ratfunc(5, "(t^4+3*t^3+4*t^2+4)/t^2")
    assert Q.x == expected_x
    assert frobenius_twist(E, 0).contains(Q.x, Q.y)
    # independent duplication polynomials
    bound = _duplication_bound(E)
    assert bound.x_after_doubling(P.x) == expected_x


@pytest.mark.parametrize("p", [2, 3, 5])
def test_group_laws_random(p, rng):
    for E in random_curves(rng, p, 2):
        pts = []
        # gather small points by scanning a few x-values
        from kperec.torsion import lift_x
        for c in range(p):
            for shift in (0, 1):
                x = RatFunc(Poly(p, [c, shift]))
                for y in lift_x(E, x):
                    pts.append(TowerPoint(E, 0, (x, y)))
            if len(pts) >= 4:
                break
        pts.append(TowerPoint.infinity(E))
        for _ in range(30):
            A = pts[rng.randrange(len(pts))]
            B = pts[rng.randrange(len(pts))]
            C = pts[rng.randrange(len(pts))]
            assert A + B == B + A
            assert (A + B) + C == A + (B + C)


def test_scalar_mul_distributes(rng):
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    for _ in range(10):
        m = rng.randrange(-8, 9)
        n = rng.randrange(-8, 9)
        assert scalar_mul(m + n, P) == scalar_mul(m, P) + scalar_mul(n, P)
    assert scalar_mul(0, P).is_infinity
    assert scalar_mul(-3, P) == -scalar_mul(3, P)


def test_mismatched_curves_rejected():
    P = TowerPoint.affine(E1(), "t", "t")
    E2 = WeierstrassCurve(5, "0", "0", "0", "1", "t")
    Q = TowerPoint.infinity(E2)
    with pytest.raises(ValueError):
        add(P, Q)


# ---------------------------------------------------------------------------
# Frobenius structure
# ---------------------------------------------------------------------------

def test_twist_examples():
    const = WeierstrassCurve(5, 0, 0, 0, 1, 0)
    assert frobenius_twist(const, 3) == const
    E = WeierstrassCurve(5, "0", "0", "0", "1", "t")
    assert frobenius_twist(E, 1) == WeierstrassCurve(5, "0", "0", "0", "1", "t^5")
    assert frobenius_twist(frobenius_twist(E, 1), 1) == frobenius_twist(E, 2)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_twist_disc_is_frobenius_power(p, rng):
    for E in random_curves(rng, p, 2):
        assert frobenius_twist(E, 1).disc == E.disc.frobenius(1)


def test_frobenius_bijection_round_trip():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    FP = frobenius_map(P)
    assert FP.curve == frobenius_twist(E, 1)
    assert FP.x == P.x.frobenius()
    assert frobenius_inverse(E, FP) == P


def test_frobenius_inverse_levels():
    E = E1()
    tw = frobenius_twist(E, 1)
    # x-coordinate t has no 5th root: genuine level-1 point
    from kperec.torsion import lift_x
    found = None
    for c in range(5):
        x = parse_ratfunc(5, f"t+{c}")
        ys = lift_x(tw, x)
        if ys:
            found = TowerPoint(tw, 0, (x, ys[0]))
            break
    if found is not None:
        back = frobenius_inverse(E, found)
        assert back.level == 1
        assert frobenius_map(back) == found


def test_frobenius_is_homomorphism(rng):
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    for m in (2, 3, 5):
        Q = scalar_mul(m, P)
        assert frobenius_map(P + Q) == frobenius_map(P) + frobenius_map(Q)


def test_verschiebung_identities():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    FP = frobenius_map(P)
    assert verschiebung(E, FP) == scalar_mul(5, P)
    assert verschiebung(E, TowerPoint.infinity(frobenius_twist(E, 1))).is_infinity
    # F(V(Q)) = p Q on the twist
    Q = FP
    assert frobenius_map(verschiebung(E, Q)) == scalar_mul(5, Q)


def test_tower_containment_for_level_points():
    E = E1()
    tw = frobenius_twist(E, 1)
    from kperec.torsion import lift_x
    for c in range(5):
        x = parse_ratfunc(5, f"t+{c}")
        for y in lift_x(tw, x):
            P = TowerPoint(E, 1, (x, y))
            assert P.level == 1
            assert scalar_mul(5, P).level == 0


def test_level_normalization():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    # feeding the Frobenius image as a level-1 representative must collapse to P
    lifted = TowerPoint(E, 1, (P.x.frobenius(), P.y.frobenius()))
    assert lifted.level == 0
    assert lifted == P


def test_point_json_round_trip():
    E = E1()
    P = TowerPoint.affine(E, "t", "t")
    assert TowerPoint.from_json(E, P.to_json()) == P
    O = TowerPoint.infinity(E)
    assert TowerPoint.from_json(E, O.to_json()) == O


def test_perf_coordinates():
    E = E1()
    tw = frobenius_twist(E, 1)
    from kperec.torsion import lift_x
    for c in range(5):
        x = parse_ratfunc(5, f"t+{c}")
        ys = lift_x(tw, x)
        if ys:
            P = TowerPoint(E, 1, (x, ys[0]))
            px, py = P.perf_coordinates()
            assert px.level == 1 and px.rep == x
            break


def test_char2_and_char3_curves_work():
    # non-isotrivial char-2 curve: y^2 + txy = x^3 + 1
    E2 = WeierstrassCurve(2, "t", "0", "0", "0", "1")
    assert E2.disc == parse_ratfunc(2, "t^6")
    assert not E2.is_isotrivial()
    from kperec.torsion import lift_x
    pts = []
    for c in range(2):
        x = RatFunc.const(2, c)
        for y in lift_x(E2, x):
            pts.append(TowerPoint(E2, 0, (x, y)))
    for P in pts:
        assert scalar_mul(2, P) == P + P
    # char-3 curve with a2 term (non-isotrivial)
    E3, P3 = curve_with_point(3, "0", "t", "1")
    assert not E3.is_isotrivial()
    assert scalar_mul(4, P3) == scalar_mul(2, scalar_mul(2, P3))
