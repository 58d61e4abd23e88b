"""Reference systems and rule graphs used throughout the tests and the CLI."""

from __future__ import annotations

from fractions import Fraction as F
from typing import Sequence, Tuple

from .augtree import LeveledGraph, build_chain_rule, build_explicit
from .geometry import Box, Similitude, SimilitudeSystem

CHAIN_LEVELS = (1, 3, 6, 10)


def five_three() -> SimilitudeSystem:
    """``x/5, (4-x)/5, (x+4)/5`` on ``[0, 1]``; two cells touch at 4/5."""
    r = F(1, 5)
    maps = (Similitude.make(r, [[1]], [0]),
            Similitude.make(r, [[-1]], [F(4, 5)]),
            Similitude.make(r, [[1]], [F(4, 5)]))
    return SimilitudeSystem(maps, Box((F(0),), (F(1),)))


def uniform_cantor(n: int, ratio) -> SimilitudeSystem:
    """``n`` maps ``r x + i (1 - r)/(n - 1)`` spread evenly over ``[0, 1]``."""
    r = F(ratio)
    step = (1 - r) / (n - 1)
    maps = tuple(Similitude.make(r, [[1]], [i * step]) for i in range(n))
    return SimilitudeSystem(maps, Box((F(0),), (F(1),)))


def middle_third(labels: Sequence[int] = (0, 2)) -> SimilitudeSystem:
    """``x/3, (x+2)/3``; symbols default to the ternary digits 0 and 2."""
    maps = (Similitude.make(F(1, 3), [[1]], [0]), Similitude.make(F(1, 3), [[1]], [F(2, 3)]))
    return SimilitudeSystem(maps, Box((F(0),), (F(1),)), tuple(labels))


def cantor_translate(alpha) -> SimilitudeSystem:
    return middle_third().translated((F(alpha),))


def planar_pair(r=F(2, 5), c: Tuple = (0, 0, 0, 0)) -> Tuple[SimilitudeSystem, SimilitudeSystem]:
    """Two planar three-map systems ``r(x + d)`` sharing the diagonal maps.

    ``d_1 = 0``, ``d_2 = (s, s)`` with ``s = 1/r - 1``; the third digit is
    ``(c1, s - c2)`` for the first system and ``(s - c3, c4)`` for the second.
    """
    r = F(r)
    s = 1 / r - 1
    c1, c2, c3, c4 = (F(x) for x in c)
    eye = [[1, 0], [0, 1]]

    def system(third):
        digits = [(0, 0), (s, s), third]
        maps = tuple(Similitude.make(r, eye, [r * F(a), r * F(b)]) for a, b in digits)
        return SimilitudeSystem(maps, Box((F(0), F(0)), (F(1), F(1))))

    return system((c1, s - c2)), system((s - c3, c4))


def single_edge_binary(depth: int) -> LeveledGraph:
    """Binary tree with the one horizontal edge ``11 - 12``."""
    return build_explicit(2, depth, [((1, 1), (1, 2))])


def chain_binary(depth: int, levels=CHAIN_LEVELS) -> LeveledGraph:
    """Binary tree with edges ``1^p - 1^{p-1}2`` for ``p`` in ``levels``."""
    return build_chain_rule(levels, depth)
