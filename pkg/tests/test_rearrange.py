from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from hyperlip import rearrange as R
from hyperlip.errors import EigenMismatch, GcdDoesNotDivide, InvalidArgument, NotPrimitive


def test_documented_infeasible_row():
    assert R.solve_rearrange([0, 3], [1, 2], 3, 2) is None
    assert not R.bin_fill_feasible([0, 3], [1, 2], 3, 2)
    assert not R.brute_force_matrices([0, 3], [1, 2], 3, 2)


def test_solutions_satisfy_both_identities():
    c = R.solve_rearrange([1, 1], [1, 2], 3)
    assert R.is_rearranging(c, [1, 1], [1, 2], 3)
    q = R.solve_quasi([1], [1], 3, 1)
    assert R.is_rearranging(q, [1], [1], 3, exact=False)


rows = st.integers(1, 3).flatmap(lambda m: st.tuples(
    st.lists(st.integers(0, 3), min_size=m, max_size=m), st.lists(st.integers(1, 3), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(rows, st.integers(1, 6))
def test_small_instances_against_literal_enumeration(row, n):
    a, u = row
    total = sum(x * y for x, y in zip(a, u))
    if total == 0 or total % n or total // n > 3:
        return
    p = total // n
    got = R.solve_rearrange(a, u, n, p)
    assert (got is not None) == R.brute_force_matrices(a, u, n, p)
    if got is not None:
        assert R.is_rearranging(got, a, u, n)


@settings(max_examples=100, deadline=None)
@given(rows, st.integers(1, 6), st.integers(1, 3))
def test_quasi_against_enumeration(row, n, p):
    a, u = row
    got = R.solve_quasi(a, u, n, p)
    assert (got is not None) == R.brute_force_matrices(a, u, n, p, exact=False)


def test_grid_slice_against_oracle():
    mism = 0
    for m in (1, 2):
        for a in product(range(5), repeat=m):
            for u in product(range(1, 4), repeat=m):
                for n in range(1, 7):
                    mism += (R.solve_rearrange(a, u, n) is not None) != R.bin_fill_feasible(a, u, n)
    assert mism == 0


def test_lemma32():
    rep = R.lemma32_check([6], [1], 3)
    assert rep.gcd_divides and rep.threshold_holds and rep.p == 2 and rep.threshold == 4
    assert not R.lemma32_check([100, 100], [1, 2], 3).threshold_holds
    assert not R.lemma32_check([3], [2], 3).gcd_divides
    with pytest.raises(InvalidArgument):
        R.lemma32_check([1], [1], 3)


def test_power_rearrangement_witness():
    res = R.power_rearrange([[3]], [2], 3)
    assert res.k == 1 and res.target == 6 and res.matrices == [[[3]]]
    with pytest.raises(NotPrimitive):
        R.power_rearrange([[0, 1], [1, 0]], [1, 1], 1)
    with pytest.raises(EigenMismatch):
        R.power_rearrange([[2]], [1], 3)


def test_needs_a_higher_power():
    # row [3, 1] with weights [2, 3] weighs 9 but cannot fill three groups of weight 3
    assert R.solve_rearrange([3, 1], [2, 3], 3, 3) is None
    res = R.power_rearrange([[0, 2], [3, 1]], [2, 3], 3)
    assert res.k == 2 and res.target == 9
    for row, c in zip(res.power, res.matrices):
        assert R.is_rearranging(c, row, [2, 3], 9)


def test_cor34_variant():
    with pytest.raises(GcdDoesNotDivide):
        R.cor34_rearrange([[3]], [2], 3)
    res = R.cor34_rearrange([[2, 2], [2, 2]], [1, 1], 4)
    assert res.k == 1 and all(len(c) == 1 for c in res.matrices)


def test_quasi_power_witness():
    res = R.quasi_power_rearrange([[1]], [1], 3)
    assert res.n == 1 and res.bordered == [[1, 2], [0, 3]] and res.w == [2]
    assert res.matrices == [[[1]]]
    assert sum(x * y for x, y in zip(res.matrices[0][0], [1])) <= 3
    eq = R.quasi_power_rearrange([[3]], [2], 3)
    assert eq.n == 0 and eq.power.k == 1
