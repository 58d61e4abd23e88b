from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from hyperlip import augtree, catalog, classes
from hyperlip.errors import DualExpansionNotSupported, InvalidArgument
from hyperlip.ternary import alpha_edge, signed_ternary_expand

fractions01 = st.fractions(min_value=F(1, 500), max_value=F(499, 500), max_denominator=500)


def test_one_third_is_dual():
    e = signed_ternary_expand(F(1, 3))
    assert e.dual
    assert e.value() == F(1, 3)
    with pytest.raises(DualExpansionNotSupported):
        alpha_edge((0,), (2,), e)


def test_one_quarter_has_period_zero_two():
    e = signed_ternary_expand(F(1, 4))
    assert not e.dual
    assert e.preperiod == () and e.period == (0, 2)
    assert e.value() == F(1, 4)


@given(fractions01.filter(lambda x: 0 < x < 1))
def test_expansion_round_trips(alpha):
    e = signed_ternary_expand(alpha)
    assert e.value() == alpha
    assert all(d in (-2, 0, 2) for d in e.prefix(30))


def test_out_of_range():
    for bad in (0, 1, F(3, 2), -F(1, 5)):
        with pytest.raises(InvalidArgument):
            signed_ternary_expand(bad)


@pytest.mark.parametrize("alpha", [F(1, 4), F(1, 5), F(2, 7), F(1, 10)])
def test_digit_rule_matches_geometry(alpha):
    depth = 5
    rule = augtree.build_digit_rule(signed_ternary_expand(alpha), depth)
    geo = augtree.build_union_from_ifs([catalog.middle_third(), catalog.cantor_translate(alpha)], depth)
    assert rule.levels == geo.levels
    assert rule.horizontal == geo.horizontal


def test_quarter_union_is_simple():
    g = augtree.build_digit_rule(signed_ternary_expand(F(1, 4)), 8)
    r = classes.classify(g)
    assert r.simple and classes.verify_eigen(r, 2)
    assert r.sizes == [2, 2, 1]
