"""Exact solvers for rearranging rows into groups of bounded weight.

A row ``a`` counts items of ``m`` kinds, kind ``j`` weighing ``u_j``.  A
rearranging matrix ``C`` (``p`` rows) splits the items into ``p`` groups:
column sums of ``C`` give back ``a`` and each group weighs exactly ``N``
(or at most ``N`` in the quasi variant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product
from typing import List, Optional, Sequence, Tuple

from .errors import EigenMismatch, GcdDoesNotDivide, InvalidArgument, NotPrimitive
from .matstruct import as_matrix, is_primitive, matpow, matvec

Row = Tuple[int, ...]


def _check(a, u, n, p):
    a, u = tuple(int(x) for x in a), tuple(int(x) for x in u)
    if len(a) != len(u):
        raise InvalidArgument("row and weight vector differ in length")
    if any(x < 0 for x in a) or any(x <= 0 for x in u):
        raise InvalidArgument("counts must be nonnegative and weights positive")
    if n <= 0 or p is None or p <= 0:
        raise InvalidArgument("target and group count must be positive")
    return a, u


def _group_rows(a: Row, u: Row, n: int, exact: bool) -> List[Row]:
    """All group contents ``c <= a`` of weight ``n`` (or ``<= n``), largest first."""
    rows = []

    def rec(j, left, acc):
        if j == len(a):
            if left == 0 or not exact:
                rows.append(tuple(acc))
            return
        for c in range(min(a[j], left // u[j]), -1, -1):
            acc.append(c)
            rec(j + 1, left - c * u[j], acc)
            acc.pop()

    rec(0, n, [])
    return rows


def _search(a: Row, u: Row, n: int, p: int, exact: bool) -> Optional[List[Row]]:
    rows = _group_rows(a, u, n, exact)
    if exact and sum(x * y for x, y in zip(a, u)) != p * n:
        return None
    dead = set()

    # rows are taken in non-increasing order of their index in ``rows`` to
    # avoid revisiting permutations of the same grouping
    def dfs(rem: Row, start: int, left: int) -> Optional[List[Row]]:
        if left == 0:
            return [] if not any(rem) else None
        if sum(x * y for x, y in zip(rem, u)) > left * n:
            return None
        key = (rem, start, left)
        if key in dead:
            return None
        for i in range(start, len(rows)):
            c = rows[i]
            if all(x <= y for x, y in zip(c, rem)):
                out = dfs(tuple(y - x for x, y in zip(c, rem)), i, left - 1)
                if out is not None:
                    return [c] + out
        dead.add(key)
        return None

    return dfs(a, 0, p)


def solve_rearrange(a, u, n: int, p: Optional[int] = None) -> Optional[List[List[int]]]:
    """A ``p x m`` matrix with column sums ``a`` and every row weighing ``n``.

    ``p`` defaults to ``a.u / n``; ``None`` means no such matrix exists.
    """
    if p is None:
        total = sum(int(x) * int(y) for x, y in zip(a, u))
        if n <= 0:
            raise InvalidArgument("target must be positive")
        if total % n or total == 0:
            return None
        p = total // n
    a, u = _check(a, u, n, p)
    out = _search(a, u, n, p, True)
    return None if out is None else [list(r) for r in out]


def solve_quasi(a, u, n: int, p: int) -> Optional[List[List[int]]]:
    """As :func:`solve_rearrange` but rows may weigh less than ``n``."""
    a, u = _check(a, u, n, p)
    out = _search(a, u, n, p, False)
    return None if out is None else [list(r) for r in out]


def is_rearranging(c, a, u, n: int, exact: bool = True) -> bool:
    """Post-hoc check of both defining identities."""
    if not c:
        return False
    cols = [sum(col) for col in zip(*c)]
    weights = [sum(x * y for x, y in zip(row, u)) for row in c]
    if cols != [int(x) for x in a] or any(x < 0 for row in c for x in row):
        return False
    return all(w == n for w in weights) if exact else all(w <= n for w in weights)


@lru_cache(maxsize=None)
def _fill_oracle(items: Tuple[int, ...], n: int, p: int) -> bool:
    # Items placed one at a time into bins tracked by their fill histogram.
    @lru_cache(maxsize=None)
    def go(k: int, hist: Tuple[int, ...]) -> bool:
        if k == len(items):
            return hist[n] == p
        w = items[k]
        for level in range(n - w, -1, -1):
            if hist[level]:
                h = list(hist)
                h[level] -= 1
                h[level + w] += 1
                if go(k + 1, tuple(h)):
                    return True
        return False

    if any(w > n for w in items):
        return False
    start = [0] * (n + 1)
    start[0] = p
    return go(0, tuple(start))


def bin_fill_feasible(a, u, n: int, p: Optional[int] = None) -> bool:
    """Independent check: can the items fill ``p`` bins of capacity ``n`` exactly?"""
    total = sum(int(x) * int(y) for x, y in zip(a, u))
    if p is None:
        if total % n or total == 0:
            return False
        p = total // n
    if total != p * n:
        return False
    items = tuple(sorted((int(y) for x, y in zip(a, u) for _ in range(int(x))), reverse=True))
    return _fill_oracle(items, n, p)


def brute_force_matrices(a, u, n: int, p: int, exact: bool = True) -> bool:
    """Literal enumeration of all ``p x m`` matrices with entries up to ``max(a)``."""
    a = [int(x) for x in a]
    m = len(a)
    for flat in product(range(max(a, default=0) + 1), repeat=p * m):
        c = [list(flat[i * m:(i + 1) * m]) for i in range(p)]
        if is_rearranging(c, a, u, n, exact):
            return True
    return False


@dataclass(frozen=True)
class Lemma32Report:
    gcd_divides: bool
    threshold_holds: bool
    p: int
    threshold: int


def lemma32_check(a, u, n: int) -> Lemma32Report:
    """Sufficient condition: ``gcd(u) | N`` and ``a_i > p^2 (sum u)(prod u)``."""
    a, u = [int(x) for x in a], [int(x) for x in u]
    if len(a) != len(u):
        raise InvalidArgument("row and weight vector differ in length")
    total = sum(x * y for x, y in zip(a, u))
    if n <= 0 or total % n:
        raise InvalidArgument(f"a.u = {total} is not divisible by N = {n}")
    p = total // n
    threshold = p * p * sum(u) * math.prod(u)
    return Lemma32Report(n % reduce(math.gcd, u) == 0, all(x > threshold for x in a), p, threshold)


@dataclass(frozen=True)
class PowerRearrangement:
    k: int
    target: int
    power: List[List[int]]
    matrices: List[List[List[int]]]


@dataclass(frozen=True)
class QuasiPowerRearrangement:
    n: int
    k: int
    w: List[int]
    bordered: List[List[int]]
    target: int
    matrices: List[List[List[int]]]
    power: Optional[PowerRearrangement] = None


def _prepare(a, u, n):
    a = as_matrix(a)
    u = [int(x) for x in u]
    if len(u) != len(a):
        raise InvalidArgument("weight vector length differs from the matrix size")
    if not is_primitive(a):
        raise NotPrimitive("matrix is not primitive")
    return a, u


def _rows_for(power, u, target, group_counts, solver):
    mats = []
    for row, p in zip(power, group_counts):
        c = solver(row, u, target, p)
        if c is None:
            return None
        mats.append(c)
    return mats


def power_rearrange(a, u, n: int, k_budget: int = 6) -> Optional[PowerRearrangement]:
    """Least ``k`` with each row ``i`` of ``A^k`` split into ``u_i/g`` groups of weight ``g N^k``."""
    a, u = _prepare(a, u, n)
    if matvec(a, u) != [n * x for x in u]:
        raise EigenMismatch("A u differs from N u")
    g = reduce(math.gcd, u)
    for k in range(1, k_budget + 1):
        power = matpow(a, k)
        target = g * n ** k
        mats = _rows_for(power, u, target, [x // g for x in u], solve_rearrange)
        if mats is not None:
            return PowerRearrangement(k, target, power, mats)
    return None


def cor34_rearrange(a, u, n: int, k_budget: int = 6) -> Optional[PowerRearrangement]:
    """As :func:`power_rearrange` with target ``N^k`` and ``u_i`` groups; needs ``gcd(u) | N``."""
    u_int = [int(x) for x in u]
    g = reduce(math.gcd, u_int)
    if n % g:
        raise GcdDoesNotDivide(f"gcd(u) = {g} does not divide N = {n}")
    a, u = _prepare(a, u_int, n)
    if matvec(a, u) != [n * x for x in u]:
        raise EigenMismatch("A u differs from N u")
    for k in range(1, k_budget + 1):
        power = matpow(a, k)
        target = n ** k
        mats = _rows_for(power, u, target, list(u), solve_rearrange)
        if mats is not None:
            return PowerRearrangement(k, target, power, mats)
    return None


def quasi_power_rearrange(a, u, n: int, n_budget: int = 6, k_budget: int = 6) -> Optional[QuasiPowerRearrangement]:
    """Quasi rearrangement of a power through the bordered matrix ``[[A^n, w], [0, N^n]]``.

    ``w = N^n u - A^n u`` must be positive; the strict problem for row ``i``
    of the ``k``-th power of the bordered matrix (weights ``[u, 1]``) is
    solved and the last column dropped.  Equality ``A u = N u`` goes to
    :func:`power_rearrange` instead.
    """
    a, u = _prepare(a, u, n)
    au = matvec(a, u)
    if any(x > n * y for x, y in zip(au, u)):
        raise InvalidArgument("A u exceeds N u")
    if au == [n * x for x in u]:
        strict = power_rearrange(a, u, n, k_budget)
        if strict is None:
            return None
        return QuasiPowerRearrangement(0, strict.k, [0] * len(u), strict.power, strict.target,
                                       strict.matrices, strict)
    g = reduce(math.gcd, u)
    m = len(u)
    for e in range(1, n_budget + 1):
        an = matpow(a, e)
        w = [n ** e * y - x for x, y in zip(matvec(an, u), u)]
        if any(x <= 0 for x in w):
            continue
        bordered = [row + [wi] for row, wi in zip(an, w)] + [[0] * m + [n ** e]]
        u2 = u + [1]
        for k in range(1, k_budget + 1):
            power = matpow(bordered, k)
            target = g * n ** (e * k)
            mats = _rows_for(power[:m], u2, target, [x // g for x in u], solve_rearrange)
            if mats is not None:
                quasi = [[row[:m] for row in c] for c in mats]
                return QuasiPowerRearrangement(e, k, w, bordered, target, quasi)
    return None
