from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from torusflow.blowup import (
    Arc,
    BlowupError,
    BlowupPath,
    BlowupPoint,
    ChainSegment,
    FiniteChain,
    Segment,
    TransversalityError,
    arc_policy,
    crossings,
    eta,
    h_inverse,
    h_map,
    intersection_number,
    lift_path,
)
from torusflow.points import Direction, I, MINUS_I, MINUS_ONE, ONE, RationalPoint

P = RationalPoint


def test_eta_profile():
    assert eta(Fraction(1, 10)) == 0
    assert eta(Fraction(3, 16)) == Fraction(1, 2)
    assert eta(Fraction(1, 3)) == 1


def test_h_map_examples():
    assert h_map(P("3/16", 0)) == BlowupPoint(P("3/32", 0))
    assert h_map(P("1/8", 0)) == BlowupPoint(P(0, 0), ONE)
    assert h_map(P(0, "-1/8")) == BlowupPoint(P(0, 0), MINUS_I)
    assert h_map(P("1/4", "1/4")) == BlowupPoint(P("1/4", "1/4"))
    with pytest.raises(BlowupError):
        h_map(P("1/16", 0))


@pytest.mark.parametrize("z", [P("3/16", 0), P("1/2", "7/32"), P("3/40", "1/10"), P("1/3", "1/5")])
def test_h_inverse_round_trip(z):
    assert h_inverse(h_map(z)) == z


def test_segment_cannot_cross_lattice_interior():
    with pytest.raises(BlowupError):
        Segment(P(0, 0), P(1, 0))
    s = Segment(P(0, 0), P("1/2", 0))
    assert s.start_point() == BlowupPoint(P(0, 0), ONE)
    assert s.end_point() == BlowupPoint(P("1/2", 0), MINUS_ONE)


def test_lift_through_a_lattice_point_inserts_an_arc():
    path = lift_path([P("-1/4", "1/4"), P("1/4", "-1/4")], "plus")
    kinds = [type(p).__name__ for p in path.pieces]
    assert kinds == ["Segment", "Arc", "Segment"]
    arc = path.pieces[1]
    assert arc.center == P(0, 0)
    assert arc.from_theta == Direction(-1, 1) and arc.to_theta == Direction(1, -1)
    # the plus policy goes through +1
    assert arc.contains(ONE)
    minus = lift_path([P("-1/4", "1/4"), P("1/4", "-1/4")], "minus")
    assert minus.pieces[1].contains(MINUS_ONE)


def test_lift_with_explicit_choices_and_endpoints():
    path = lift_path([P(0, 0), P(0, "1/4")], {P(0, 0): "cw"}, start_theta=MINUS_ONE)
    assert path.start == BlowupPoint(P(0, 0), MINUS_ONE)
    assert path.pieces[0] == Arc(P(0, 0), MINUS_ONE, I, False)
    with pytest.raises(BlowupError):
        lift_path([P(0, 0), P(0, "1/4")], {}, start_theta=MINUS_ONE)
    with pytest.raises(BlowupError):
        lift_path([P(0, 0), P(0, "1/4")], "plus")


def test_arc_policy_between_opposite_points():
    plus, minus = arc_policy("plus"), arc_policy("minus")
    # from -1 to +1 the plus policy sweeps through +i, which is clockwise
    assert plus(P(0, 0), MINUS_ONE, ONE) is False
    assert minus(P(0, 0), MINUS_ONE, ONE) is True
    with pytest.raises(ValueError):
        arc_policy("left")


def test_concatenation_and_json_round_trip():
    a = lift_path([P("1/4", "1/4"), P("3/4", "1/4")])
    b = lift_path([P("3/4", "1/4"), P("3/4", "3/4")])
    ab = a + b
    assert ab.start == a.start and ab.end == b.end
    assert BlowupPath.from_json(ab.to_json()).pieces == ab.pieces
    with pytest.raises(BlowupError):
        b + a


vertex = st.builds(lambda x, y: P(Fraction(x, 8) + Fraction(1, 16), Fraction(y, 8) + Fraction(1, 16)),
                   st.integers(-12, 12), st.integers(-12, 12))
chain_piece = st.builds(
    lambda x, y, c: ChainSegment(P(Fraction(x, 5) + Fraction(1, 50), Fraction(y, 7)),
                                 P(Fraction(x, 5) + Fraction(1, 50), Fraction(y, 7) + 1), c),
    st.integers(-8, 8), st.integers(-8, 8), st.integers(-5, 5))


@settings(max_examples=60, deadline=None)
@given(st.lists(vertex, min_size=2, max_size=5), st.lists(chain_piece, min_size=1, max_size=4),
       st.sampled_from(["plus", "minus"]))
def test_reversal_negates_and_concatenation_adds(vs, pieces, policy):
    chain = FiniteChain(pieces)
    try:
        path = lift_path(vs, policy)
        n = intersection_number(path, chain)
    except TransversalityError:
        return
    assert intersection_number(path.reversed(), chain) == -n
    mid = len(vs) // 2
    first, second = lift_path(vs[:mid + 1], policy), lift_path(vs[mid:], policy)
    assert intersection_number(first, chain) + intersection_number(second, chain) == n


def test_crossing_sign_and_coefficient():
    chain = FiniteChain([ChainSegment(P("1/4", -1), P("1/4", 1), 3, "v")])
    right = lift_path([P(0, "1/3"), P("1/3", "1/3")])
    (x,) = crossings(right, chain)
    assert (x.sign, x.coefficient, x.contribution) == (1, 3, 3)
    assert intersection_number(right.reversed(), chain) == -3


def test_arc_crossing_on_a_circle():
    # a chain piece leaving the circle at +i is met by a ccw arc from +1 to -1
    chain = FiniteChain([ChainSegment(P(0, 0), P(0, "1/4"), 2, "up")])
    arc = BlowupPath([Arc(P(0, 0), ONE, MINUS_ONE, True)])
    (x,) = crossings(arc, chain)
    assert x.location == BlowupPoint(P(0, 0), I)
    assert x.sign == -1
    assert crossings(BlowupPath([Arc(P(0, 0), ONE, MINUS_ONE, False)]), chain) == []


@pytest.mark.parametrize("path", [
    lambda: lift_path([P("-1/3", "1/4"), P("1/3", "1/4")]),       # runs along the piece
    lambda: lift_path([P("-1/3", "1/8"), P("-1/4", "1/4")]),       # ends on it
    lambda: lift_path([P("1/3", 0), P("1/2", "1/4")]),             # touches its endpoint
])
def test_tangencies_raise(path):
    chain = FiniteChain([ChainSegment(P("-1/2", "1/4"), P("1/2", "1/4"), 1, "h")])
    with pytest.raises(TransversalityError):
        crossings(path(), chain)


def test_arc_ending_on_chain_raises():
    chain = FiniteChain([ChainSegment(P(0, 0), P(0, "1/4"), 2, "up")])
    with pytest.raises(TransversalityError):
        crossings(BlowupPath([Arc(P(0, 0), ONE, I, True)]), chain)
