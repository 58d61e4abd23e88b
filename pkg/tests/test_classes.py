import pytest

from conftest import cantor_one, five_three, planar_union, single_edge
from hyperlip import augtree, catalog, classes
from hyperlip.errors import CapExceeded, InsufficientDepth, NotSimple


def test_five_three():
    r = classes.classify(five_three(6))
    assert r.simple and r.sizes == [1, 2] and r.incidence == [[1, 1], [0, 3]]
    assert r.classes[1].representative == ((2,), (3,))
    assert classes.verify_eigen(r, 3)


def test_single_edge():
    r = classes.classify(single_edge(6))
    assert r.sizes == [1, 1, 2] and r.incidence == [[0, 0, 1], [0, 2, 0], [0, 4, 0]]


def test_planar_union_and_cantor_one():
    assert classes.classify(planar_union(6)).incidence == [[2, 2], [0, 3]]
    assert classes.classify(cantor_one(6)).incidence == [[1, 2], [0, 2]]


def test_budget_does_not_change_a_simple_answer():
    g = five_three(7)
    answers = {(tuple(r.sizes), str(r.incidence)) for r in (classes.classify(g, b) for b in (1, 2, 3, 4))}
    assert len(answers) == 1


def test_class_of_covers_window_and_agrees_with_rows():
    g = five_three(6)
    r = classes.classify(g)
    for n in range(1, r.budget + 1):
        for comp in g.components(n):
            i = r.class_of[comp]
            row = [0] * r.class_count
            for d in r.children[comp]:
                row[r.class_of[d]] += 1
            assert row == r.incidence[i]


def test_subgraph_incidence():
    g = five_three(7)
    r = classes.subgraph_incidence(g, [(2,), (3,)])
    assert r.sizes == [2] and r.incidence == [[3]]
    r1 = classes.subgraph_incidence(g, [(1,)])
    assert r1.incidence == [[1, 1], [0, 3]]


def test_chain_rule_is_inconclusive_and_counts_grow():
    counts = []
    for b in (3, 4, 5, 6):
        r = classes.classify(catalog.chain_binary(b + 5), b)
        assert r.verdict == classes.INCONCLUSIVE and r.incidence == []
        counts.append(r.class_count)
    assert counts == sorted(set(counts))
    with pytest.raises(NotSimple):
        classes.verify_eigen(classes.classify(catalog.chain_binary(8), 3), 2)


def test_depth_requirement():
    with pytest.raises(InsufficientDepth):
        classes.classify(five_three(4), 3)


def test_cap():
    g = augtree.build_explicit(2, 4, [((1,), (2,))])
    with pytest.raises(CapExceeded):
        classes.classify(g, 1, cap=1)


def test_plain_tree_has_one_class():
    r = classes.classify(augtree.plain_tree([1, 2, 3], 5))
    assert r.sizes == [1] and r.incidence == [[3]]


def test_json_shape():
    data = classes.classify(five_three(6)).to_json()
    assert data["verdict"] == "Simple"
    assert data["classes"][1]["representative"] == ["2", "3"]
