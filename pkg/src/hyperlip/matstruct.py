"""Nonnegative integer matrices: condensation, primitivity and periods.

Matrices are plain lists of lists of Python ints so powers stay exact.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidArgument, NotIrreducible

ZERO = "Zero"
IRREDUCIBLE = "Irreducible"
PRIMITIVE = "Primitive"

Matrix = List[List[int]]


def as_matrix(a) -> Matrix:
    m = [[int(x) for x in row] for row in a]
    if any(len(row) != len(m) for row in m):
        raise InvalidArgument("matrix must be square")
    if any(x < 0 for row in m for x in row):
        raise InvalidArgument("matrix entries must be nonnegative")
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def matpow(a: Matrix, k: int) -> Matrix:
    if k < 0:
        raise InvalidArgument("negative power")
    n = len(a)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [row[:] for row in a]
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def matvec(a: Matrix, v: Sequence[int]) -> List[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def submatrix(a: Matrix, idx: Sequence[int]) -> Matrix:
    return [[a[i][j] for j in idx] for i in idx]


@dataclass(frozen=True)
class FrobeniusForm:
    """``P^T A P`` is block upper triangular with the listed diagonal blocks.

    ``permutation[k]`` is the original index placed at position ``k``;
    ``blocks`` lists original indices per diagonal block, in order.
    """

    permutation: Tuple[int, ...]
    blocks: Tuple[Tuple[int, ...], ...]
    block_kinds: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]

    def diagonal_blocks(self, a: Matrix) -> List[Matrix]:
        return [submatrix(a, b) for b in self.blocks]


def _strong_components(a: Matrix):
    n = len(a)
    if n == 0:
        return 0, []
    graph = csr_matrix(np.array([[1 if x else 0 for x in row] for row in a], dtype=np.int8))
    count, labels = connected_components(graph, directed=True, connection="strong")
    return count, [int(x) for x in labels]


def frobenius_form(a) -> FrobeniusForm:
    """Condensation of the support graph, blocks in topological order.

    Among blocks with no pending predecessor the one holding the smallest
    original index goes first, which keeps triangular input in place.
    """
    a = as_matrix(a)
    n = len(a)
    count, labels = _strong_components(a)
    members = [[] for _ in range(count)]
    for i, lab in enumerate(labels):
        members[lab].append(i)
    succ = [set() for _ in range(count)]
    indeg = [0] * count
    for i in range(n):
        for j in range(n):
            if a[i][j] and labels[i] != labels[j] and labels[j] not in succ[labels[i]]:
                succ[labels[i]].add(labels[j])
                indeg[labels[j]] += 1
    ready = sorted((members[c][0], c) for c in range(count) if indeg[c] == 0)
    order = []
    while ready:
        _, c = ready.pop(0)
        order.append(c)
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append((members[d][0], d))
        ready.sort()
    blocks = tuple(tuple(members[c]) for c in order)
    kinds = tuple(_block_kind(submatrix(a, b)) for b in blocks)
    perm = tuple(i for b in blocks for i in b)
    mat = tuple(tuple(a[i][j] for j in perm) for i in perm)
    return FrobeniusForm(perm, blocks, kinds, mat)


def _block_kind(b: Matrix) -> str:
    if len(b) == 1 and b[0][0] == 0:
        return ZERO
    return PRIMITIVE if period(b) == 1 else IRREDUCIBLE


def is_irreducible(b) -> bool:
    b = as_matrix(b)
    if len(b) == 1:
        return b[0][0] > 0
    count, _ = _strong_components(b)
    return count == 1


def is_primitive(b) -> bool:
    """Some power up to the Wielandt bound ``(n-1)^2 + 1`` is positive."""
    b = as_matrix(b)
    n = len(b)
    support = np.array([[x > 0 for x in row] for row in b], dtype=bool)
    power = support.copy()
    for _ in range((n - 1) ** 2 + 1):
        if power.all():
            return True
        power = (power.astype(np.int64) @ support.astype(np.int64)) > 0
    return False


def period(b) -> int:
    """gcd of cycle lengths; from BFS levels as ``gcd(level[i] + 1 - level[j])`` over edges."""
    b = as_matrix(b)
    if not is_irreducible(b):
        raise NotIrreducible("period is defined for irreducible matrices")
    n = len(b)
    level = [-1] * n
    level[0] = 0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if b[i][j] and level[j] < 0:
                level[j] = level[i] + 1
                queue.append(j)
    g = 0
    for i in range(n):
        for j in range(n):
            if b[i][j]:
                g = math.gcd(g, level[i] + 1 - level[j])
    return abs(g)


def blocks_primitive_or_zero(a) -> bool:
    return all(k != IRREDUCIBLE for k in frobenius_form(a).block_kinds)


def _divisors(n: int) -> List[int]:
    return sorted({d for i in range(1, math.isqrt(n) + 1) if n % i == 0 for d in (i, n // i)})


def lemma41_exponent(a, max_rounds: int = 8) -> Tuple[int, FrobeniusForm]:
    """Smallest ``l`` with every diagonal block of ``A^l`` primitive or zero.

    The candidate is the lcm of the block periods, taken again on the
    blocks of the power until the test passes; the result is then the least
    divisor of that candidate which passes the direct test on ``A^d``.
    """
    a = as_matrix(a)
    total = 1
    power = a
    for _ in range(max_rounds):
        form = frobenius_form(power)
        if all(k != IRREDUCIBLE for k in form.block_kinds):
            break
        periods = [period(submatrix(power, b)) for b, k in zip(form.blocks, form.block_kinds)
                   if k == IRREDUCIBLE]
        step = reduce(lambda x, y: x * y // math.gcd(x, y), periods, 1)
        total *= step
        power = matpow(a, total)
    else:
        raise InvalidArgument("exponent search did not settle")
    for d in _divisors(total):
        pd = matpow(a, d)
        if blocks_primitive_or_zero(pd):
            return d, frobenius_form(pd)
    raise AssertionError("the candidate exponent itself must pass")
