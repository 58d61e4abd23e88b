import numpy as np
import pytest

from conftest import five_three, planar_union, single_edge
from hyperlip import augtree, catalog, neariso
from hyperlip.errors import DivisibilityViolation, InsufficientDepth, NotPrimitive


def test_target_blocks():
    y = neariso.build_target(2, 2, 3, 3).graph
    assert len(y.levels[1]) == 2 and y.edges(1) == [((1,), (2,))]
    # runs of two at level 2 cross from the first copy into the second
    assert ((1, 3), (2, 1)) in y.edges(2)
    with pytest.raises(DivisibilityViolation):
        neariso.build_target(3, 2, 3, 2)


@pytest.mark.parametrize("n,copies", [(3, 2), (2, 4), (3, 1), (2, 3), (4, 6)])
def test_union_shuffle_bound(n, copies):
    sigma = neariso.sigma_union(n, copies, 4)
    rep = neariso.verify_distortion(sigma)
    assert rep.exhaustive and rep.distortion <= copies // n + 1
    assert neariso.check_bijective(sigma)
    assert rep.gromov_deviation <= rep.distortion / 2 + rep.level_shift


def test_union_shuffle_first_words():
    sigma = neariso.sigma_union(3, 2, 3)
    assert sigma((1,)) == (1,)
    assert sigma((2,)) == (2, 1)
    assert sigma((3, 1)) == (2, 2)
    assert sigma((3, 2)) == (2, 3, 1)
    assert sigma((3,)) == (2,)
    assert sigma((3, 3)) == (2, 3)


def test_primitive_subtree_of_five_three():
    g = five_three(7)
    for depth in (3, 4, 5):
        sigma = neariso.sigma_primitive(g, [(2,), (3,)], depth)
        rep = neariso.verify_distortion(sigma)
        assert rep.distortion <= 3
        assert neariso.check_bijective(sigma)
        assert rep.gromov_deviation <= rep.distortion / 2


def test_primitive_requires_primitive_subtree():
    with pytest.raises(NotPrimitive):
        neariso.sigma_primitive(single_edge(7), [(1, 1), (1, 2)], 5)


@pytest.mark.parametrize("build,depth,bound", [(planar_union, 4, 2), (single_edge, 5, 1)])
def test_general_maps_with_bounded_distortion(build, depth, bound):
    g = build(depth + 2)
    sigma = neariso.sigma_general(g, depth)
    rep = neariso.verify_distortion(sigma)
    assert rep.distortion <= bound
    assert neariso.check_bijective(sigma)
    assert neariso.first_block_cohesion(sigma)
    assert rep.level_shift == 0 and rep.gromov_deviation <= rep.distortion / 2


def test_general_is_level_preserving_and_cohesive_on_five_three():
    g = five_three(7)
    sigma = neariso.sigma_general(g, 5)
    assert all(len(x) == len(y) for x, y in sigma.mapping.items())
    assert neariso.check_bijective(sigma)
    assert neariso.first_block_cohesion(sigma)


def test_general_on_five_three_grows_with_depth():
    # The pair class has odd branching 3 under class size 2, so some pair
    # straddles two sibling subtrees at every level: the plain-tree distance
    # of such a pair grows by 2 per level while its X-distance stays 1.
    g = five_three(7)
    values = [neariso.verify_distortion(neariso.sigma_general(g, d)).distortion for d in (3, 4, 5)]
    assert values == [5, 7, 9]


def test_block_edges_versus_plain_tree_identity():
    # the identity from copies-with-runs onto bare copies is not a near-isometry when u does not divide N
    out = []
    for d in (3, 4, 5):
        y = neariso.build_target(2, 2, 3, d).graph
        v = augtree.vertical_only(y)
        w = [x for level in y.levels for x in level]
        out.append(int(np.abs(augtree.distance_matrix(y, w).astype(int) - augtree.distance_matrix(v, w)).max()))
    assert out == [5, 7, 9]
    y = neariso.build_target(3, 3, 3, 4).graph
    v = augtree.vertical_only(y)
    w = [x for level in y.levels for x in level]
    assert int(np.abs(augtree.distance_matrix(y, w).astype(int) - augtree.distance_matrix(v, w)).max()) <= 2


def test_depth_margin_required():
    with pytest.raises(InsufficientDepth):
        neariso.sigma_general(five_three(5), 5)


def test_certificate_fields():
    sigma = neariso.sigma_union(3, 2, 3)
    neariso.verify_distortion(sigma)
    cert = sigma.certificate()
    for key in ("target", "exceptions", "measured_distortion", "depths_checked", "exhaustive"):
        assert key in cert
    assert cert["exceptions"] == {"domain": ["o"], "target": ["o"]}


def test_sampled_verification_is_deterministic():
    sigma = neariso.sigma_union(3, 2, 4)
    a = neariso.verify_distortion(sigma, pair_budget=2000)
    b = neariso.verify_distortion(sigma, pair_budget=2000)
    assert not a.exhaustive and a == b
