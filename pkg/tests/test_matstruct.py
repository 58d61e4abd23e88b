from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperlip import matstruct as M
from hyperlip.errors import InvalidArgument, NotIrreducible

small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n))


def _positive_power(a, limit=40):
    p = np.array(a, dtype=object)
    b = p.copy()
    for _ in range(limit):
        if (b > 0).all():
            return True
        b = (b.dot(p) > 0).astype(object)
    return False


@settings(max_examples=200)
@given(small_matrices)
def test_frobenius_form_is_block_triangular(a):
    f = M.frobenius_form(a)
    pos = {i: k for k, b in enumerate(f.blocks) for i in b}
    for i in range(len(a)):
        for j in range(len(a)):
            if a[i][j]:
                assert pos[i] <= pos[j]
    for b, kind in zip(f.blocks, f.block_kinds):
        sub = M.submatrix(a, b)
        if kind == M.ZERO:
            assert sub == [[0]]
        else:
            assert M.is_irreducible(sub)
            assert (kind == M.PRIMITIVE) == _positive_power(sub)


@settings(max_examples=200)
@given(small_matrices)
def test_primitivity_matches_powers(a):
    assert M.is_primitive(a) == _positive_power(a)


def test_period_of_cycles():
    assert M.period([[0, 1], [1, 0]]) == 2
    assert M.period([[0, 1, 0], [0, 0, 1], [1, 0, 0]]) == 3
    assert M.period([[1, 1], [1, 0]]) == 1
    with pytest.raises(NotIrreducible):
        M.period([[1, 1], [0, 1]])


def test_lemma_exponent_examples():
    ell, form = M.lemma41_exponent([[0, 1], [1, 0]])
    assert ell == 2 and form.block_kinds == (M.PRIMITIVE, M.PRIMITIVE)
    assert M.lemma41_exponent([[1, 1], [0, 3]])[0] == 1
    six = [[0, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1], [0, 0, 1, 0, 0]]
    assert M.lemma41_exponent(six)[0] == 6


def test_lemma_exponent_sweep():
    for n in (1, 2):
        for flat in product(range(2), repeat=n * n):
            a = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
            ell, _ = M.lemma41_exponent(a)
            assert M.blocks_primitive_or_zero(M.matpow(a, ell))


def test_input_validation():
    with pytest.raises(InvalidArgument):
        M.as_matrix([[1, 2]])
    with pytest.raises(InvalidArgument):
        M.as_matrix([[-1]])


def test_matpow():
    assert M.matpow([[1, 1], [0, 3]], 2) == [[1, 4], [0, 9]]
    assert M.matpow([[2]], 0) == [[1]]
