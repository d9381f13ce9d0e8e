"""Projective points, residue balls, window/cone membership."""

import random

import pytest

from pingpong3.errors import (
    AllCoordinatesVanish,
    EqualPoints,
    InsufficientLevel,
    InsufficientPrecision,
    LaurentSyntaxError,
    OutsideChart,
)
from pingpong3.field import INF, Field, Laurent
from pingpong3.linalg import Mat
from pingpong3.projgeom import (
    ProjLine,
    ProjPoint,
    ball_count,
    ball_of_point,
    enumerate_balls,
    image_ball,
    in_slope_u_cone,
    in_unit_window,
    line_has_slope_u,
    parse_ball,
    slope_pair,
)

F2 = Field(2)
F3 = Field(3)


def pt(field, *texts):
    return ProjPoint(tuple(field.parse(t) for t in texts))


def perturbed(field, coords, level, rng):
    """A random point of the same level ball (tails of valuation >= level)."""
    out = []
    for x in coords:
        tail_digits = [rng.randrange(field.q) for _ in range(3)]
        out.append(x + field.from_int_poly(tail_digits, lead=level))
    return out


# -- points and normalization -------------------------------------------------


def test_point_normalization():
    p = ProjPoint((F2.u(2), F2.u(3), F2.u(4)))
    assert [str(c) for c in p.coords] == ["1", "u", "u^2"]
    assert p.pivot == 0
    # pivot priority: z before y before x
    assert pt(F2, "u", "1 + u", "u^2").pivot == 1
    assert pt(F2, "1", "1", "1").pivot == 2
    p3 = ProjPoint((F3.monomial(2, 2), F3.zero(), F3.zero()))
    assert [str(c) for c in p3.coords] == ["1", "0", "0"]


def test_point_rejects_zero_and_undecided():
    with pytest.raises(AllCoordinatesVanish):
        ProjPoint((F2.zero(), F2.zero(), F2.zero()))
    with pytest.raises(InsufficientPrecision):
        ProjPoint((F2.unknown(2), F2.unknown(3), F2.zero()))


def test_point_equality_is_projective():
    a = pt(F2, "1", "1 + u", "u^2")
    b = ProjPoint(tuple(x.shift(5) for x in a.coords))
    assert a == b
    assert a.equal(pt(F2, "1", "1", "u^2")) is False
    fuzzy = ProjPoint((F2.one() + F2.unknown(4), F2.one(), F2.one()))
    assert fuzzy.equal(pt(F2, "1", "1", "1")) is None


def test_dist_exponent():
    x = pt(F2, "1", "1", "1")
    assert x.dist_exponent(pt(F2, "1 + u", "1", "1")) == 1
    assert x.dist_exponent(pt(F2, "1 + u^3", "1 + u^3", "1 + u^3")) is INF
    assert x.dist_exponent(pt(F2, "u", "1", "u")) == 0
    y = pt(F2, "1 + u^2", "1", "1")
    assert x.dist_exponent(y) == y.dist_exponent(x) == 2


def test_affine_chart():
    x, y = pt(F2, "u", "1 + u", "1").affine()
    assert str(x) == "u" and str(y) == "1 + u"
    with pytest.raises(OutsideChart):
        pt(F2, "1", "u", "u^2").affine()


# -- lines ---------------------------------------------------------------------


def test_line_through_points():
    a = pt(F2, "1", "1", "1")
    b = pt(F2, "1", "u", "0")
    line = ProjLine.through(a, b)
    assert line.contains(a) is True
    assert line.contains(b) is True
    assert line.contains(pt(F2, "1", "0", "0")) is False
    assert line_has_slope_u(line) is True
    with pytest.raises(EqualPoints):
        ProjLine.through(a, pt(F2, "1", "1", "1"))


def test_slope_pair():
    x = pt(F2, "1", "1", "1")
    num, den = slope_pair(x, pt(F2, "1 + u", "1 + u^2", "1"))
    assert (num - den.shift(1)).is_exact_zero  # slope exactly u
    num, den = slope_pair(x, pt(F2, "1 + u", "1", "1"))
    assert num.is_exact_zero and den.val() == 1  # slope 0
    with pytest.raises(EqualPoints):
        slope_pair(x, x)


# -- window and cone membership -------------------------------------------------


def test_unit_window_membership():
    assert in_unit_window(pt(F2, "1", "1", "1").coords) is True
    assert in_unit_window(pt(F2, "1 + u^2", "1 + u^3", "1").coords) is True
    assert in_unit_window(pt(F2, "1 + u", "1", "1").coords) is False
    assert in_unit_window(pt(F2, "1", "u", "0").coords) is False
    # invariance under scaling of the raw coordinates
    y = tuple(x.shift(-4) for x in pt(F2, "1 + u^2", "1", "1").coords)
    assert in_unit_window(y) is True
    # abstract tails: decidable exactly when the bound is strong enough
    lam = F2.unknown(2)
    assert in_unit_window((F2.one() + lam, F2.one(), F2.one())) is True
    assert in_unit_window((F2.one() + F2.unknown(1), F2.one(), F2.one())) is None


def test_slope_cone_membership():
    x = pt(F2, "1", "1", "1").coords
    assert in_slope_u_cone(x, pt(F2, "1 + u", "1 + u^2", "1").coords) is True
    assert in_slope_u_cone(x, pt(F2, "1 + u", "1", "1").coords) is False
    assert in_slope_u_cone(x, x) is True
    # vertical line (slope infinity)
    assert in_slope_u_cone(x, pt(F2, "1", "1 + u^2", "1").coords) is False
    # direction [1 : u : 0] is the slope-u point at infinity
    assert in_slope_u_cone(x, pt(F2, "1", "u", "0").coords) is True
    # undecidable when the slope is only known to O(u)
    fuzzy = (F2.parse("1 + u"), F2.one() + F2.unknown(1).shift(1), F2.one())
    assert in_slope_u_cone(x, fuzzy) is None


def test_cone_membership_not_constant_on_level2_balls():
    # y and y' share a level-2 ball yet differ on cone membership: this is
    # why verification levels must be >= 3
    x = pt(F2, "1", "1", "1")
    y = pt(F2, "1 + u", "1 + u^2", "1")
    y2 = pt(F2, "1 + u", "1", "1")
    assert ball_of_point(y, 2) == ball_of_point(y2, 2)
    assert in_slope_u_cone(x.coords, y.coords) is True
    assert in_slope_u_cone(x.coords, y2.coords) is False


def test_cone_membership_constant_on_distant_level3_balls():
    # constancy holds exactly on balls with distance exponent <= M - 2
    # from the apex; for M = 3 that means distance >= q^-1
    rng = random.Random(73)
    x = pt(F2, "1", "1", "1")
    for ball in enumerate_balls(2, 3):
        rep = ball.vector()
        e = x.dist_exponent(ball.point())
        if e > 1:
            continue
        base = in_slope_u_cone(x.coords, rep)
        assert base is not None
        for _ in range(4):
            y = perturbed(F2, rep, 3, rng)
            assert in_slope_u_cone(x.coords, y) is base


def test_cone_membership_mixes_on_level3_balls_adjacent_to_apex():
    # the ball of [1 + u^2 : 1 : 1] is at distance q^-2 from the apex and
    # contains points on both sides of the cone
    x = pt(F2, "1", "1", "1")
    rep = pt(F2, "1 + u^2", "1", "1")
    assert x.dist_exponent(rep) == 2
    inside = pt(F2, "1 + u^2 + u^3", "1 + u^3", "1")
    assert ball_of_point(inside, 3) == ball_of_point(rep, 3)
    assert in_slope_u_cone(x.coords, rep.coords) is False
    assert in_slope_u_cone(x.coords, inside.coords) is True


# -- balls ----------------------------------------------------------------------


def test_ball_counts():
    for q, level, want in ((2, 1, 7), (2, 2, 28), (2, 3, 112), (3, 1, 13), (3, 2, 117)):
        balls = list(enumerate_balls(q, level))
        assert len(balls) == want == ball_count(q, level)
        assert len(set(balls)) == want
    assert ball_count(2, 10) == 1835008
    assert ball_count(3, 6) == 767637


def test_balls_partition_the_plane():
    rng = random.Random(79)
    for q in (2, 3):
        field = Field(q)
        balls = list(enumerate_balls(q, 2))
        # canonical representatives map back to their own ball...
        for b in balls:
            assert ball_of_point(b.point(), 2) == b
        # ...repelling representatives of distinct balls are >= q^-2 apart
        reps = [b.point() for b in balls]
        for _ in range(150):
            i, j = rng.randrange(len(reps)), rng.randrange(len(reps))
            d = reps[i].dist_exponent(reps[j])
            if i == j:
                assert d is INF
            else:
                assert d < 2
        # ...and nearby points land in the same ball
        for _ in range(40):
            b = balls[rng.randrange(len(balls))]
            y = ProjPoint(perturbed(field, b.vector(), 2, rng))
            assert ball_of_point(y, 2) == b


def test_ball_text_roundtrip():
    p = pt(F2, "u", "1 + u", "u^2")
    ball = ball_of_point(p, 2)
    assert ball.stratum == 1
    assert ball.text() == "2:01/10/00"
    assert parse_ball("2:01/10/00", 2) == ball
    assert parse_ball(ball.text(), 2).point() == ProjPoint(
        (F2.u(1), F2.one(), F2.zero())
    )
    for bad in ("2:01/10", "x:01/10/00", "2:01/10/0", "2:01/12/00"):
        with pytest.raises(LaurentSyntaxError):
            parse_ball(bad, 2)


def test_ball_of_point_requires_precision():
    fuzzy = ProjPoint((F2.one() + F2.unknown(2), F2.one(), F2.one()))
    assert ball_of_point(fuzzy, 2) == ball_of_point(pt(F2, "1", "1", "1"), 2)
    with pytest.raises(InsufficientPrecision):
        ball_of_point(fuzzy, 3)


def test_image_ball():
    g = Mat.diagonal([F2.u(2), F2.one(), F2.u(-2)])
    src = ball_of_point(pt(F2, "1", "1", "1"), 6)
    img = image_ball(g, src)
    assert img.level == 2
    assert img == ball_of_point(pt(F2, "u^4", "u^2", "1"), 2)
    rng = random.Random(83)
    for _ in range(10):
        y = ProjPoint(perturbed(F2, src.vector(), 6, rng))
        gy = ProjPoint(g.matvec(y.coords))
        assert ball_of_point(gy, 2) == img
    with pytest.raises(InsufficientLevel):
        image_ball(g ** 3, src)


def test_image_ball_isometry_for_integral_unimodular():
    # SL_3(O) preserves levels: mu = (0,0,0)
    rng = random.Random(89)
    m = Mat.identity(2)
    for _ in range(4):
        i, j = rng.sample(range(3), 2)
        m = m * Mat.elementary(2, i, j, Laurent(2, rng.randrange(0, 3), (1,)))
    assert m.cartan_projection() == (0, 0, 0)
    src = ball_of_point(pt(F2, "1 + u", "u", "1"), 4)
    assert image_ball(m, src).level == 4
