from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from torusflow.points import (
    I,
    MINUS_I,
    MINUS_ONE,
    ONE,
    Direction,
    RationalPoint,
    frac,
    strictly_inside_arc,
)


def test_frac_refuses_floats():
    with pytest.raises(TypeError):
        frac(0.25)
    assert frac("3/4") == Fraction(3, 4)


def test_point_parse_and_lattice():
    p = RationalPoint.parse("1/2,-1")
    assert p.on_half_lattice()
    assert p.doubled() == (1, -2)
    assert not RationalPoint("1/4", 0).on_half_lattice()


def test_direction_equality_is_projective_positive():
    assert Direction(2, 0) == ONE
    assert Direction(-3, 0) == MINUS_ONE
    assert Direction(0, 5) != MINUS_I
    assert Direction.parse("-i") == MINUS_I
    assert Direction.parse("3,4").unit() == (Fraction(3, 5), Fraction(4, 5))


def test_arc_membership():
    assert strictly_inside_arc(MINUS_I, I, True, ONE)
    assert not strictly_inside_arc(MINUS_I, I, True, MINUS_ONE)
    assert strictly_inside_arc(MINUS_I, I, False, MINUS_ONE)
    assert not strictly_inside_arc(MINUS_I, I, True, I)
    # full turn holds everything but its base point
    assert strictly_inside_arc(ONE, ONE, True, MINUS_ONE)
    assert not strictly_inside_arc(ONE, ONE, True, ONE)


small = st.integers(-20, 20)


@given(small, small, small, small)
def test_key_order_agrees_with_atan2(a, b, c, d):
    import math
    if (a, b) == (0, 0) or (c, d) == (0, 0):
        return
    x, y = Direction(a, b), Direction(c, d)
    ax = math.atan2(b, a) % (2 * math.pi)
    ay = math.atan2(d, c) % (2 * math.pi)
    if x == y:
        assert x.key() == y.key()
    elif abs(ax - ay) > 1e-12:
        assert (x.key() < y.key()) == (ax < ay)
