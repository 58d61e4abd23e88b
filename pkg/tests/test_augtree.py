from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cantor_one, five_three, planar_union, single_edge
from hyperlip import augtree, catalog
from hyperlip.errors import ClosureViolation, InvalidArgument


def test_five_three_levels():
    g = five_three(3)
    assert [len(l) for l in g.levels] == [1, 3, 9, 27]
    assert g.edges(1) == [((2,), (3,))]
    assert ((2, 1), (3, 1)) in g.edges(2)
    assert g.max_component_size() == 2
    augtree.check_closure(g)


def test_explicit_rule_propagates_edges():
    g = single_edge(4)
    assert g.edges(1) == []
    assert g.edges(2) == [((1, 1), (1, 2))]
    # children of joined parents are joined when their cells would touch; the rule adds none
    assert len(g.edges(3)) == 0


def test_closure_violation_detected():
    with pytest.raises(ClosureViolation):
        augtree.build_explicit(2, 3, [((1, 1), (2, 1))])


@st.composite
def random_rules(draw):
    depth = draw(st.integers(3, 4))
    n = draw(st.integers(2, 3))
    pairs = []
    for level in (1, 2):
        words = augtree.plain_tree(list(range(1, n + 1)), level).levels[level]
        for a in words:
            for b in words:
                if a < b and a[:-1] == b[:-1] and draw(st.booleans()):
                    pairs.append((a, b))
    return n, depth, pairs


@settings(max_examples=30, deadline=None)
@given(random_rules())
def test_geodesic_equals_bfs_on_random_rules(rule):
    n, depth, edges = rule
    g = augtree.build_explicit(n, depth, edges)
    words = [v for l in g.levels for v in l]
    d = augtree.distance_matrix(g, words)
    for i, x in enumerate(words):
        bfs = augtree.explicit_distances(g, x)
        assert [bfs[y] for y in words] == list(d[i])


def test_geodesic_summary():
    g = five_three(4)
    s = augtree.geodesic(g, (2, 1, 1), (3, 1, 1))
    assert s.distance == 1 and s.horizontal_length == 1 and s.bend_level == 3
    s = augtree.geodesic(g, (1, 1), (3, 3))
    assert s.distance == 4 and s.bend_level == 0
    assert augtree.gromov_product(g, (2, 1, 1), (3, 1, 1)) == F(5, 2)


def test_true_gromov_bracket():
    # the product in X never exceeds the product in the quotient and trails it by at most k/2
    for g in (five_three(5), single_edge(6), cantor_one(5)):
        report = augtree.gromov_sandwich_check(g)
        assert report.reverse_holds
        assert report.max_gap <= 0 and report.min_gap >= -F(report.k, 2)


def test_telescope_symbols_and_edges():
    g = five_three(4)
    t = augtree.telescope(g, 2)
    assert t.depth == 2 and t.alphabet_size == 9
    assert ((((2, 1),), ((3, 1),))) in t.edges(1)
    assert augtree.telescope(g, 1) is g
    with pytest.raises(InvalidArgument):
        augtree.telescope(five_three(5), 2)


def test_subgraph_and_quotient():
    g = five_three(4)
    sub = augtree.subgraph(g, [(2,), (3,)])
    assert sub.top == 1 and len(sub.levels[4]) == 54
    q = augtree.quotient_tree(g)
    assert [len(l) for l in q.levels] == [1, 2, 5, 14, 41]


def test_dot_round_trip():
    for g in (five_three(3), single_edge(4), planar_union(3), augtree.telescope(five_three(4), 2)):
        assert augtree.read_dot(augtree.export_dot(g)) == g


def test_distance_matrix_with_horizontal_parts():
    g = five_three(3)
    words = g.levels[3]
    d, h = augtree.distance_matrix(g, words, with_horizontal=True)
    assert np.all(h <= d)
    assert h.max() <= g.max_component_size() - 1 + 2


def test_union_tags_copies():
    g = cantor_one(3)
    assert g.levels[1] == [(1,), (2,)]
    assert g.edges(1) == [((1,), (2,))]


def test_hyperbolicity_witness_small():
    w = augtree.hyperbolicity_witness(five_three(3))
    assert not w.sampled and w.max_horizontal_part == 1
