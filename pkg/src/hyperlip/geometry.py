"""Exact similitude algebra and the cell-intersection oracle.

All scalar data are :class:`fractions.Fraction`.  Rotations must be
orthogonal matrices with rational entries (the check is exact).

Distances between boxes are measured in the max-norm so that they stay
rational; for signed-permutation rotations (every system used here) the
relative-frame distances rescale exactly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence, Tuple

from .errors import InvalidArgument, InvalidSystem, InvalidWord

INFINITY = math.inf

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]

INTERSECT = "Intersect"
DISJOINT = "Disjoint"
UNKNOWN = "Unknown"


def _identity(d: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a)


def _matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def is_orthogonal(rotation: Matrix) -> bool:
    d = len(rotation)
    if any(len(row) != d for row in rotation):
        return False
    return _matmul(_transpose(rotation), rotation) == _identity(d)


def solve_linear(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector:
    """Gaussian elimination over the rationals; ``a`` must be nonsingular."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(b[i])] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise InvalidArgument("singular linear system")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(row[n] for row in m)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box with rational corners."""

    lo: Vector
    hi: Vector

    @classmethod
    def hull(cls, points: Iterable[Sequence[Fraction]]) -> "Box":
        pts = list(points)
        d = len(pts[0])
        return cls(tuple(min(p[k] for p in pts) for k in range(d)),
                   tuple(max(p[k] for p in pts) for k in range(d)))

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def corners(self):
        return product(*zip(self.lo, self.hi))

    def diameter(self) -> Fraction:
        """Max-norm diameter (the longest side)."""
        return max(h - l for l, h in zip(self.lo, self.hi))

    def gap(self, other: "Box") -> Fraction:
        """Max-norm distance between the boxes; zero when they meet."""
        g = Fraction(0)
        for l1, h1, l2, h2 in zip(self.lo, self.hi, other.lo, other.hi):
            g = max(g, l2 - h1, l1 - h2)
        return g

    def meets(self, other: "Box") -> bool:
        return all(l1 <= h2 and l2 <= h1 for l1, h1, l2, h2 in zip(self.lo, self.hi, other.lo, other.hi))

    def contains(self, other: "Box") -> bool:
        return all(l1 <= l2 and h2 <= h1 for l1, h1, l2, h2 in zip(self.lo, self.hi, other.lo, other.hi))

    def union(self, other: "Box") -> "Box":
        return Box(tuple(map(min, self.lo, other.lo)), tuple(map(max, self.hi, other.hi)))


@dataclass(frozen=True)
class Similitude:
    """The map ``x -> ratio * rotation @ x + translation``."""

    ratio: Fraction
    rotation: Matrix
    translation: Vector

    @classmethod
    def identity(cls, d: int) -> "Similitude":
        return cls(Fraction(1), _identity(d), tuple(Fraction(0) for _ in range(d)))

    @classmethod
    def make(cls, ratio, rotation, translation) -> "Similitude":
        rot = tuple(tuple(Fraction(x) for x in row) for row in rotation)
        return cls(Fraction(ratio), rot, tuple(Fraction(x) for x in translation))

    @property
    def dimension(self) -> int:
        return len(self.translation)

    def __call__(self, x: Sequence[Fraction]) -> Vector:
        rx = _matvec(self.rotation, x)
        return tuple(self.ratio * a + b for a, b in zip(rx, self.translation))

    def then(self, other: "Similitude") -> "Similitude":
        """``other`` applied after ``self``."""
        return other.compose(self)

    def compose(self, inner: "Similitude") -> "Similitude":
        """``self ∘ inner``."""
        return Similitude(
            self.ratio * inner.ratio,
            _matmul(self.rotation, inner.rotation),
            self(inner.translation),
        )

    def inverse(self) -> "Similitude":
        rt = _transpose(self.rotation)
        inv_ratio = 1 / self.ratio
        shift = _matvec(rt, self.translation)
        return Similitude(inv_ratio, rt, tuple(-inv_ratio * s for s in shift))

    def image(self, box: Box) -> Box:
        """Bounding box of the image (exact for signed permutations)."""
        return Box.hull(self(c) for c in box.corners())

    def fixed_point(self) -> Vector:
        d = self.dimension
        a = [[Fraction(int(i == j)) - self.ratio * self.rotation[i][j] for j in range(d)] for i in range(d)]
        return solve_linear(a, self.translation)

    def describe(self) -> str:
        if self.dimension == 1:
            a = self.ratio * self.rotation[0][0]
            return f"x -> {a}*x + {self.translation[0]}"
        return f"x -> {self.ratio}*R{[list(map(str, r)) for r in self.rotation]}x + {list(map(str, self.translation))}"


def invariant_box(maps: Sequence[Similitude], rounds: int = 64) -> Box:
    """Smallest fixed-point hull grown until ``S_i(B) ⊆ B`` for every map."""
    box = Box.hull(m.fixed_point() for m in maps)
    for _ in range(rounds):
        images = [m.image(box) for m in maps]
        if all(box.contains(im) for im in images):
            return box
        for im in images:
            box = box.union(im)
    raise InvalidSystem(f"no invariant box found within {rounds} rounds")


@dataclass(frozen=True)
class SimilitudeSystem:
    """An IFS of equal-ratio similitudes together with an invariant box J.

    ``labels`` are the symbols naming the maps in words (``1..N`` unless
    given, e.g. ``(0, 2)`` for the middle-third Cantor set).
    """

    maps: Tuple[Similitude, ...]
    invariant: Box = None
    labels: Tuple[int, ...] = None
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if len(maps) < 2:
            raise InvalidSystem("at least 2 maps are required")
        d = maps[0].dimension
        r = maps[0].ratio
        for m in maps:
            if m.dimension != d or len(m.rotation) != d:
                raise InvalidSystem("all maps must share one dimension")
            if m.ratio != r:
                raise InvalidSystem("all maps must share one contraction ratio")
            if not is_orthogonal(m.rotation):
                raise InvalidSystem("rotation matrices must be orthogonal")
        if not 0 < r < 1:
            raise InvalidSystem(f"ratio must lie strictly between 0 and 1, got {r}")
        labels = tuple(self.labels) if self.labels is not None else tuple(range(1, len(maps) + 1))
        if len(labels) != len(maps) or len(set(labels)) != len(labels):
            raise InvalidSystem("labels must be distinct, one per map")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(labels)})
        box = self.invariant if self.invariant is not None else invariant_box(maps)
        if box.dimension != d:
            raise InvalidSystem("invariant box dimension mismatch")
        for m in maps:
            if not box.contains(m.image(box)):
                raise InvalidSystem("supplied box is not invariant under every map")
        object.__setattr__(self, "invariant", box)

    @property
    def dimension(self) -> int:
        return self.maps[0].dimension

    @property
    def ratio(self) -> Fraction:
        return self.maps[0].ratio

    @property
    def size(self) -> int:
        return len(self.maps)

    def map_for(self, symbol) -> Similitude:
        try:
            return self.maps[self._index[symbol]]
        except (KeyError, TypeError):
            raise InvalidWord(f"symbol {symbol!r} is not one of {self.labels}") from None

    def translated(self, shift: Sequence) -> "SimilitudeSystem":
        """The conjugate system whose attractor is ``K + shift``."""
        shift = tuple(Fraction(s) for s in shift)
        maps = []
        for m in self.maps:
            # T ∘ S ∘ T^{-1}: x -> S(x - shift) + shift
            moved = m(tuple(-s for s in shift))
            maps.append(Similitude(m.ratio, m.rotation, tuple(a + s for a, s in zip(moved, shift))))
        box = Box(tuple(l + s for l, s in zip(self.invariant.lo, shift)),
                  tuple(h + s for h, s in zip(self.invariant.hi, shift)))
        return SimilitudeSystem(tuple(maps), box, self.labels)


def compose(system: SimilitudeSystem, word: Sequence) -> Similitude:
    """``S_{w1} ∘ ... ∘ S_{wn}``; the empty word gives the identity."""
    result = Similitude.identity(system.dimension)
    for s in word:
        result = result.compose(system.map_for(s))
    return result


def cell_box(system: SimilitudeSystem, word: Sequence) -> Box:
    return compose(system, word).image(system.invariant)


@dataclass(frozen=True)
class IntersectionVerdict:
    outcome: str
    witness_depth: int
    separation: Optional[Fraction] = None

    @property
    def intersect(self) -> bool:
        return self.outcome == INTERSECT


class NeighborOracle:
    """Decides ``K_a ∩ g(K_b) ≠ ∅`` for relative maps ``g`` of ratio one.

    A state ``g`` is alive when ``J_a`` meets the box of ``g(J_b)``; its
    children are ``S_i^{-1} ∘ g ∘ S_j``.  An infinite chain of alive states
    pins a common point (both cells shrink to it), and in a finite state
    graph that is the same as reaching a cycle.  A state all of whose chains
    die is disjoint.  Decided states are cached; undecided ones are not.
    """

    def __init__(self, first: SimilitudeSystem, second: SimilitudeSystem):
        if first.dimension != second.dimension:
            raise InvalidArgument("systems live in different dimensions")
        if first.ratio != second.ratio:
            raise InvalidArgument("systems have different contraction ratios")
        self.first = first
        self.second = second
        self.ratio = first.ratio
        self._inverses = [m.inverse() for m in first.maps]
        # state -> (outcome, height, scaled gap or None)
        self._decided = {}

    def alive(self, g: Similitude) -> bool:
        return self.first.invariant.meets(g.image(self.second.invariant))

    def children(self, g: Similitude):
        out = []
        seen = set()
        for inv in self._inverses:
            left = inv.compose(g)
            for m in self.second.maps:
                c = left.compose(m)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
        return out

    def decide(self, g: Similitude, budget: int = 12) -> IntersectionVerdict:
        if budget < 0:
            raise InvalidArgument("refine budget must be non-negative")
        if g in self._decided:
            outcome, height, gap = self._decided[g]
            return IntersectionVerdict(outcome, height, gap)

        succ = {}
        frontier_states = set()
        level = {g: 0}
        queue = [g]
        head = 0
        while head < len(queue):
            s = queue[head]
            head += 1
            if s in self._decided:
                continue
            if not self.alive(s):
                self._decided[s] = (DISJOINT, 0, self.first.invariant.gap(s.image(self.second.invariant)))
                continue
            if level[s] >= budget:
                frontier_states.add(s)
                continue
            kids = self.children(s)
            succ[s] = kids
            for c in kids:
                if c not in level:
                    level[c] = level[s] + 1
                    queue.append(c)

        # States all of whose successors are decided disjoint are disjoint.
        pending = {s for s in succ}
        changed = True
        while changed:
            changed = False
            for s in list(pending):
                kids = succ[s]
                if all(self._decided.get(c, (None,))[0] == DISJOINT for c in kids):
                    height = 1 + max(self._decided[c][1] for c in kids)
                    gap = self.ratio * min(self._decided[c][2] for c in kids)
                    self._decided[s] = (DISJOINT, height, gap)
                    pending.discard(s)
                    changed = True

        # Remaining states with an infinite alive chain inside the explored
        # graph (or into a known intersecting state) intersect.
        core = set(pending)
        changed = True
        while changed:
            changed = False
            for s in list(core):
                if not any(c in core or self._decided.get(c, (None,))[0] == INTERSECT for c in succ[s]):
                    core.discard(s)
                    changed = True
        # Propagate backwards: anything reaching the core intersects.
        hit = set(core)
        changed = True
        while changed:
            changed = False
            for s in pending:
                if s not in hit and any(c in hit or self._decided.get(c, (None,))[0] == INTERSECT for c in succ[s]):
                    hit.add(s)
                    changed = True
        for s in hit:
            self._decided[s] = (INTERSECT, level.get(s, 0), None)

        if g in self._decided:
            outcome, height, gap = self._decided[g]
            if outcome == INTERSECT:
                height = max(level.values())
            return IntersectionVerdict(outcome, height, gap)
        return IntersectionVerdict(UNKNOWN, budget, None)


@functools.lru_cache(maxsize=64)
def oracle_for(first: SimilitudeSystem, second: SimilitudeSystem) -> NeighborOracle:
    return NeighborOracle(first, second)


def relative_map(first: SimilitudeSystem, word_a: Sequence, second: SimilitudeSystem, word_b: Sequence) -> Similitude:
    return compose(first, word_a).inverse().compose(compose(second, word_b))


def cells_intersect_between(first: SimilitudeSystem, word_a: Sequence, second: SimilitudeSystem,
                            word_b: Sequence, refine_budget: int = 12) -> IntersectionVerdict:
    """Intersection test for cells of two (possibly different) systems."""
    if refine_budget < 0:
        raise InvalidArgument("refine budget must be non-negative")
    if len(word_a) != len(word_b):
        raise InvalidArgument("words must have equal length")
    g = relative_map(first, word_a, second, word_b)
    verdict = oracle_for(first, second).decide(g, refine_budget)
    if verdict.outcome == DISJOINT:
        scale = first.ratio ** len(word_a)
        return IntersectionVerdict(DISJOINT, verdict.witness_depth, scale * verdict.separation)
    return verdict


def cells_intersect(system: SimilitudeSystem, word_i: Sequence, word_j: Sequence,
                    refine_budget: int = 12) -> IntersectionVerdict:
    """Decide whether the attractor cells ``K_{word_i}`` and ``K_{word_j}`` meet.

    ``Disjoint`` carries a positive lower bound on their distance (the
    smallest gap between the separating sub-boxes).
    """
    if tuple(word_i) == tuple(word_j):
        raise InvalidArgument("cells_intersect needs two distinct words")
    return cells_intersect_between(system, word_i, system, word_j, refine_budget)


def _level_maps(system: SimilitudeSystem, depth: int):
    level = [Similitude.identity(system.dimension)]
    for _ in range(depth):
        level = [m.compose(s) for m in level for s in system.maps]
        yield level


def min_positive_gap(boxes: Sequence[Box]):
    """Smallest positive max-norm gap between any two boxes, or ``INFINITY``."""
    ordered = sorted(boxes, key=lambda b: b.lo[0])
    best = INFINITY
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if b.lo[0] - a.hi[0] >= best:
                break
            g = a.gap(b)
            if 0 < g < best:
                best = g
    return best


def condition_h_margin(system: SimilitudeSystem, depth: int):
    """``min dist(J_i, J_j) / r^n`` over disjoint level-n cells, ``n <= depth``.

    Returns ``INFINITY`` when no two cells are disjoint up to ``depth``.
    """
    if depth < 1:
        raise InvalidArgument("depth must be at least 1")
    best = INFINITY
    scale = Fraction(1)
    for level in _level_maps(system, depth):
        scale *= system.ratio
        g = min_positive_gap([m.image(system.invariant) for m in level])
        if g != INFINITY:
            best = min(best, g / scale)
    return best
