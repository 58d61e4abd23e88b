from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from hyperlip import catalog
from hyperlip.errors import InvalidArgument, InvalidSystem
from hyperlip.geometry import (
    DISJOINT, INFINITY, INTERSECT, Box, Similitude, SimilitudeSystem, cell_box, cells_intersect,
    compose, condition_h_margin, is_orthogonal)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)
signs = st.sampled_from([1, -1])


@st.composite
def similitudes(draw):
    ratio = draw(st.fractions(min_value=F(1, 9), max_value=F(8, 9), max_denominator=9))
    s1, s2 = draw(signs), draw(signs)
    rot = [[s1, 0], [0, s2]] if draw(st.booleans()) else [[0, s1], [s2, 0]]
    return Similitude.make(ratio, rot, [draw(rationals), draw(rationals)])


@given(similitudes(), similitudes(), st.tuples(rationals, rationals))
def test_compose_is_application_order(f, g, x):
    assert f.compose(g)(x) == f(g(x))


@given(similitudes(), st.tuples(rationals, rationals))
def test_inverse_round_trips(f, x):
    assert f.inverse()(f(x)) == tuple(x)
    assert f.compose(f.inverse()) == Similitude.identity(2)


def test_orthogonality_is_exact():
    assert is_orthogonal([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])
    assert not is_orthogonal([[F(1, 2)]])


def test_system_validation():
    with pytest.raises(InvalidSystem, match="at least 2 maps"):
        SimilitudeSystem((Similitude.make(F(1, 3), [[1]], [0]),))
    with pytest.raises(InvalidSystem):
        SimilitudeSystem((Similitude.make(F(1, 3), [[1]], [0]), Similitude.make(F(1, 2), [[1]], [0])))


def _brute_meet(system, a, b, extra):
    # the cells meet iff their level-(n+extra) box covers keep meeting; exact for these systems
    boxes_a = [cell_box(system, a + w) for w in product(system.labels, repeat=extra)]
    boxes_b = [cell_box(system, b + w) for w in product(system.labels, repeat=extra)]
    return any(x.meets(y) for x in boxes_a for y in boxes_b)


def test_intersection_matches_fine_boxes():
    system = catalog.five_three()
    words = [w for n in (1, 2) for w in product((1, 2, 3), repeat=n)]
    for a in words:
        for b in words:
            if a == b or len(a) != len(b):
                continue
            verdict = cells_intersect(system, a, b)
            assert verdict.outcome in (INTERSECT, DISJOINT)
            assert verdict.intersect == _brute_meet(system, a, b, 4), (a, b)
            if verdict.outcome == DISJOINT:
                assert verdict.separation > 0


def test_touching_point_of_five_three():
    system = catalog.five_three()
    assert cells_intersect(system, (2,), (3,)).intersect
    assert not cells_intersect(system, (1,), (2,)).intersect
    assert compose(system, (2, 1))((F(0),)) == (F(4, 5),) == compose(system, (3,))((F(0),))


def test_condition_h_margin_values():
    system = catalog.five_three()
    values = [condition_h_margin(system, n) for n in range(1, 7)]
    assert values[0] == 2
    assert len(set(values[2:])) == 1 and values[2] > 0
    with pytest.raises(InvalidArgument):
        condition_h_margin(system, 0)


def test_condition_h_margin_without_disjoint_cells():
    # two maps whose cells overlap everywhere: no disjoint pair at level 1
    sys2 = SimilitudeSystem((Similitude.make(F(2, 3), [[1]], [0]), Similitude.make(F(2, 3), [[1]], [F(1, 3)])),
                            Box((F(0),), (F(1),)))
    assert condition_h_margin(sys2, 1) == INFINITY


def test_translated_system_moves_the_attractor():
    shifted = catalog.cantor_translate(F(1, 4))
    assert shifted.invariant == Box((F(1, 4),), (F(5, 4),))
    assert compose(shifted, (2,))((F(1, 4),)) == (F(2, 3) + F(1, 4),)
