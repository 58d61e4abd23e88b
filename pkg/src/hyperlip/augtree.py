"""Depth-truncated augmented trees.

A :class:`LeveledGraph` stores the vertices of each level (words, sorted)
and the symmetric horizontal adjacency.  Vertical edges are implicit:
the parent of a word is the word with its last symbol dropped.

Distances follow the canonical geodesic shape: climb from both ends to a
common level ``m``, cross horizontally inside one component, so

    d(x, y) = min_m (|x| - m) + (|y| - m) + h_m(x|m, y|m).
"""

from __future__ import annotations

import ast
import math
import random
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ClosureViolation, InvalidArgument, UndecidedIntersection
from .geometry import (
    DISJOINT, INTERSECT, UNKNOWN, Similitude, SimilitudeSystem, oracle_for)
from .ternary import SignedTernary, alpha_edge
from .words import ROOT, Word, as_word, word_str

BIG = np.int32(1 << 28)


@dataclass(eq=False)
class LeveledGraph:
    levels: List[List[Word]]
    horizontal: Dict[Word, FrozenSet[Word]]
    alphabet_size: int
    source: str = "ExplicitRule"
    top: int = 0
    members: Optional[Dict[Word, Tuple[Word, ...]]] = None

    def __post_init__(self):
        self.levels = [sorted(level) for level in self.levels]
        self.horizontal = {v: frozenset(n) for v, n in self.horizontal.items() if n}
        self._index = {}
        for level in self.levels:
            for i, v in enumerate(level):
                self._index[v] = i
        self._children = defaultdict(list)
        for level in self.levels[self.top + 1:]:
            for v in level:
                self._children[v[:-1]].append(v)
        self._components = {}
        self._component_of = {}
        self._hdist = {}
        self._level_hdist = {}

    def __eq__(self, other):
        if not isinstance(other, LeveledGraph):
            return NotImplemented
        return (self.top == other.top and self.levels == other.levels
                and self.horizontal == other.horizontal
                and self.alphabet_size == other.alphabet_size
                and self.source == other.source and self.members == other.members)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def vertices(self, max_level: Optional[int] = None) -> List[Word]:
        last = self.depth if max_level is None else min(max_level, self.depth)
        return [v for level in self.levels[:last + 1] for v in level]

    def __contains__(self, word) -> bool:
        return tuple(word) in self._index

    def index(self, word: Word) -> int:
        return self._index[word]

    def children(self, word: Word) -> List[Word]:
        return self._children.get(word, [])

    def neighbors(self, word: Word) -> FrozenSet[Word]:
        return self.horizontal.get(word, frozenset())

    def edges(self, level: int) -> List[Tuple[Word, Word]]:
        out = []
        for v in self.levels[level]:
            for w in self.neighbors(v):
                if v < w:
                    out.append((v, w))
        return sorted(out)

    def all_edges(self) -> List[Tuple[Word, Word]]:
        return [e for n in range(len(self.levels)) for e in self.edges(n)]

    # -- components -------------------------------------------------------
    def components(self, level: int) -> List[Tuple[Word, ...]]:
        if level not in self._components:
            seen = set()
            comps = []
            for v in self.levels[level]:
                if v in seen:
                    continue
                comp = []
                queue = deque([v])
                seen.add(v)
                while queue:
                    x = queue.popleft()
                    comp.append(x)
                    for y in self.neighbors(x):
                        if y not in seen:
                            seen.add(y)
                            queue.append(y)
                comp = tuple(sorted(comp))
                comps.append(comp)
                for x in comp:
                    self._component_of[x] = comp
            comps.sort()
            self._components[level] = comps
        return self._components[level]

    def component_of(self, word: Word) -> Tuple[Word, ...]:
        if word not in self._component_of:
            self.components(len(word))
        return self._component_of[word]

    def horizontal_distance(self, a: Word, b: Word) -> Optional[int]:
        """Distance inside one level's horizontal graph, ``None`` if unlinked."""
        if a == b:
            return 0
        comp = self.component_of(a)
        if self.component_of(b) is not comp:
            return None
        if comp not in self._hdist:
            self._hdist[comp] = _component_distances(comp, self.neighbors)
        return self._hdist[comp][a, b]

    def level_distance_matrix(self, level: int) -> np.ndarray:
        if level not in self._level_hdist:
            verts = self.levels[level]
            mat = np.full((len(verts), len(verts)), BIG, dtype=np.int32)
            for comp in self.components(level):
                idx = [self._index[v] for v in comp]
                if len(comp) == 1:
                    mat[idx[0], idx[0]] = 0
                    continue
                if comp not in self._hdist:
                    self._hdist[comp] = _component_distances(comp, self.neighbors)
                dist = self._hdist[comp]
                for a, ia in zip(comp, idx):
                    for b, ib in zip(comp, idx):
                        mat[ia, ib] = dist[a, b]
            self._level_hdist[level] = mat
        return self._level_hdist[level]

    def max_component_size(self, max_level: Optional[int] = None) -> int:
        last = self.depth if max_level is None else max_level
        return max(len(c) for n in range(self.top, last + 1) for c in self.components(n))


def _component_distances(comp, neighbors):
    dist = {}
    members = set(comp)
    for s in comp:
        dist[s, s] = 0
        queue = deque([s])
        seen = {s: 0}
        while queue:
            x = queue.popleft()
            for y in neighbors(x):
                if y in members and y not in seen:
                    seen[y] = seen[x] + 1
                    dist[s, y] = seen[y]
                    queue.append(y)
    return dist


# -- validation -------------------------------------------------------------

def check_closure(graph: LeveledGraph) -> None:
    """Raise :class:`ClosureViolation` unless every horizontal edge is legal."""
    for v, nbrs in graph.horizontal.items():
        for w in nbrs:
            if v not in graph.neighbors(w):
                raise ClosureViolation(f"edge {word_str(v)}-{word_str(w)} is not symmetric")
            if len(v) != len(w) or v == w:
                raise ClosureViolation(f"edge {word_str(v)}-{word_str(w)} is not a same-level pair")
            if len(v) <= graph.top:
                continue
            pv, pw = v[:-1], w[:-1]
            if pv != pw and pw not in graph.neighbors(pv):
                raise ClosureViolation(
                    f"edge {word_str(v)}-{word_str(w)}: parents {word_str(pv)}, {word_str(pw)} "
                    "are neither equal nor adjacent")


def _tree_levels(branching: Sequence[Sequence], depth: int, root_children=None) -> List[List[Word]]:
    levels = [[ROOT]]
    for n in range(depth):
        if n == 0 and root_children is not None:
            levels.append([ (c,) for c in root_children])
            continue
        levels.append([v + (s,) for v in levels[-1] for s in branching])
    return levels


def _add_edge(horizontal, a, b):
    horizontal.setdefault(a, set()).add(b)
    horizontal.setdefault(b, set()).add(a)


def plain_tree(alphabet: Sequence, depth: int, copies: Optional[int] = None) -> LeveledGraph:
    """The bare tree; with ``copies`` the root has that many children instead."""
    root_children = None if copies is None else list(range(1, copies + 1))
    levels = _tree_levels(list(alphabet), depth, root_children)
    return LeveledGraph(levels, {}, len(alphabet), "Tree")


def vertical_only(graph: LeveledGraph) -> LeveledGraph:
    return LeveledGraph([list(l) for l in graph.levels], {}, graph.alphabet_size, "Tree", graph.top)


# -- builders ---------------------------------------------------------------

def build_explicit(n: int, depth: int, edges: Iterable) -> LeveledGraph:
    """``n``-ary tree over ``1..n`` with exactly the listed horizontal edges."""
    if depth < 0:
        raise InvalidArgument("depth must be non-negative")
    levels = _tree_levels(list(range(1, n + 1)), depth)
    known = {v for level in levels for v in level}
    horizontal = {}
    for a, b in edges:
        a, b = as_word(a), as_word(b)
        if len(a) != len(b):
            raise ClosureViolation(f"edge {word_str(a)}-{word_str(b)} joins different levels")
        if a == b:
            raise ClosureViolation(f"edge {word_str(a)}-{word_str(b)} is a loop")
        for w in (a, b):
            if w not in known:
                raise InvalidArgument(f"word {word_str(w)} is not a vertex of the depth-{depth} tree")
        _add_edge(horizontal, a, b)
    graph = LeveledGraph(levels, horizontal, n, "ExplicitRule")
    check_closure(graph)
    return graph


def build_chain_rule(special_levels: Iterable[int], depth: int) -> LeveledGraph:
    """Binary tree with edges ``(1^p, 1^{p-1}2)`` for each listed ``p <= depth``."""
    edges = []
    for p in sorted(set(special_levels)):
        if 1 <= p <= depth:
            edges.append(((1,) * p, (1,) * (p - 1) + (2,)))
    graph = build_explicit(2, depth, edges)
    graph.source = "ExplicitRule"
    return graph


def _grow(levels, horizontal, depth, symbols_of, candidate_ok, start_pairs):
    """Grow levels, testing child pairs of equal or adjacent parents.

    ``candidate_ok(x, y, payload)`` returns ``(is_edge, child_payload)`` for
    the ordered child pair; ``start_pairs`` maps parent pairs to payloads.
    """
    pairs = start_pairs
    while len(levels) <= depth:
        parents = levels[-1]
        level = [v + (s,) for v in parents for s in symbols_of(v)]
        levels.append(level)
        nxt = {}
        for (x, y), payload in pairs.items():
            for s in symbols_of(x):
                for t in symbols_of(y):
                    if x == y and not s < t:
                        continue
                    cx, cy = x + (s,), y + (t,)
                    ok, child_payload = candidate_ok(cx, cy, s, t, payload)
                    if ok:
                        _add_edge(horizontal, cx, cy)
                        nxt[cx, cy] = child_payload
        pairs = dict(nxt)
        for v in level:
            pairs[v, v] = None
    return levels


def _ifs_tree(systems: Sequence[SimilitudeSystem], depth: int, refine_budget: int, tagged: bool,
              source: str) -> LeveledGraph:
    if depth < 1:
        raise InvalidArgument("depth must be at least 1")
    if tagged:
        system_of = lambda v: systems[v[0] - 1]
    else:
        system_of = lambda v: systems[0]
    inverses = {id(s): {lab: m.inverse() for lab, m in zip(s.labels, s.maps)} for s in systems}
    d = systems[0].dimension
    ident = Similitude.identity(d)

    def decide(x, y, g):
        verdict = oracle_for(system_of(x), system_of(y)).decide(g, refine_budget)
        if verdict.outcome == UNKNOWN:
            raise UndecidedIntersection(word_str(x), word_str(y), refine_budget)
        return verdict.outcome == INTERSECT

    def candidate_ok(cx, cy, s, t, g):
        sx, sy = system_of(cx), system_of(cy)
        if g is None:
            g = ident
        g2 = inverses[id(sx)][s].compose(g).compose(sy.map_for(t))
        return decide(cx, cy, g2), g2

    horizontal = {}
    if tagged:
        levels = [[ROOT], [(i + 1,) for i in range(len(systems))]]
        start = {}
        for a, b in combinations(levels[1], 2):
            if decide(a, b, ident):
                _add_edge(horizontal, a, b)
                start[a, b] = ident
        for v in levels[1]:
            start[v, v] = None
    else:
        levels = [[ROOT]]
        start = {(ROOT, ROOT): None}
    symbols_of = lambda v: system_of(v).labels if v or not tagged else ()
    _grow(levels, horizontal, depth, symbols_of, candidate_ok, start)
    n = systems[0].size
    return LeveledGraph(levels, horizontal, n, source)


def build_from_ifs(system: SimilitudeSystem, depth: int, refine_budget: int = 12) -> LeveledGraph:
    """Augmented tree whose horizontal edges join words with meeting cells."""
    return _ifs_tree([system], depth, refine_budget, False, "IFS")


def build_union_from_ifs(systems: Sequence[SimilitudeSystem], depth: int,
                         refine_budget: int = 12) -> LeveledGraph:
    """Union tree of several IFSs in one space; cross edges from the oracle."""
    if len(systems) < 1:
        raise InvalidArgument("need at least one system")
    if len({(s.dimension, s.ratio, s.size) for s in systems}) != 1:
        raise InvalidArgument("union of IFSs needs a common dimension, ratio and map count")
    return _ifs_tree(list(systems), depth, refine_budget, True, "Union")


def build_digit_rule(expansion: SignedTernary, depth: int) -> LeveledGraph:
    """Union tree of ``C`` and ``C + alpha`` with edges from the digit rule."""
    if depth < 1:
        raise InvalidArgument("depth must be at least 1")
    horizontal = {}
    levels = [[ROOT], [(1,), (2,)]]
    start = {((1,), (1,)): None, ((2,), (2,)): None}
    if alpha_edge((), (), expansion):
        _add_edge(horizontal, (1,), (2,))
        start[(1,), (2,)] = True

    def candidate_ok(cx, cy, s, t, payload):
        if cx[0] == cy[0]:
            return False, None
        return alpha_edge(cx[1:], cy[1:], expansion), True

    _grow(levels, horizontal, depth, lambda v: (0, 2), candidate_ok, start)
    graph = LeveledGraph(levels, horizontal, 2, "DigitRule")
    return graph


def union(graphs: Sequence[LeveledGraph], cross_edges: Iterable = ()) -> LeveledGraph:
    """New root joined to the roots of each graph; subtree words gain a copy tag.

    Cross-copy horizontal edges are taken from ``cross_edges`` (words in the
    union, copy tag first).  IFS sources should use
    :func:`build_union_from_ifs`, which recomputes them geometrically.
    """
    if not graphs:
        raise InvalidArgument("need at least one graph")
    if len({g.alphabet_size for g in graphs}) != 1:
        raise InvalidArgument("union members must share an alphabet size")
    depth = min(g.depth for g in graphs) + 1
    levels = [[ROOT]] + [[] for _ in range(depth)]
    horizontal = {}
    for i, g in enumerate(graphs, start=1):
        for n in range(g.depth + 1):
            levels[n + 1].extend((i,) + v for v in g.levels[n]) if n + 1 <= depth else None
        for v, nbrs in g.horizontal.items():
            for w in nbrs:
                _add_edge(horizontal, (i,) + v, (i,) + w)
    known = {v for level in levels for v in level}
    for a, b in cross_edges:
        a, b = as_word(a), as_word(b)
        if a not in known or b not in known:
            raise InvalidArgument(f"cross edge {word_str(a)}-{word_str(b)} leaves the union")
        _add_edge(horizontal, a, b)
    out = LeveledGraph(levels, horizontal, graphs[0].alphabet_size, "Union")
    check_closure(out)
    return out


def telescope(graph: LeveledGraph, k: int) -> LeveledGraph:
    """Keep every ``k``-th level; each block of ``k`` symbols becomes one symbol."""
    if k < 1:
        raise InvalidArgument("k must be positive")
    if k == 1:
        return graph
    if graph.depth % k:
        raise InvalidArgument(f"graph depth {graph.depth} is not a multiple of {k}")
    if graph.top:
        raise InvalidArgument("telescoping needs a rooted graph")

    def block(w):
        return tuple(tuple(w[i:i + k]) for i in range(0, len(w), k))

    levels = [[block(v) for v in graph.levels[k * n]] for n in range(graph.depth // k + 1)]
    horizontal = {}
    for n in range(1, len(levels)):
        for a, b in graph.edges(k * n):
            _add_edge(horizontal, block(a), block(b))
    return LeveledGraph(levels, horizontal, graph.alphabet_size ** k, "Telescope")


def subgraph(graph: LeveledGraph, component: Sequence[Word]) -> LeveledGraph:
    """``T_D``: the component together with all of its descendants."""
    comp = tuple(sorted(as_word(w) for w in component))
    n = len(comp[0])
    if graph.component_of(comp[0]) != comp:
        raise InvalidArgument("not a horizontal component of the graph")
    levels = [[] for _ in range(n)] + [list(comp)]
    for _ in range(n, graph.depth):
        levels.append([c for v in levels[-1] for c in graph.children(v)])
    inside = {v for level in levels for v in level}
    horizontal = {v: graph.neighbors(v) for v in inside if graph.neighbors(v)}
    return LeveledGraph(levels, horizontal, graph.alphabet_size, "Subgraph", top=n)


# -- metric ---------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicSummary:
    distance: int
    bend_level: int
    horizontal_length: int


def geodesic(graph: LeveledGraph, x, y) -> GeodesicSummary:
    """Length of the canonical geodesic; ties go to the level nearest the root."""
    x, y = as_word(x), as_word(y)
    if x == y:
        return GeodesicSummary(0, len(x), 0)
    lx, ly = len(x), len(y)
    best = None
    for m in range(min(lx, ly), graph.top - 1, -1):
        vertical = lx + ly - 2 * m
        if best is not None and vertical > best[0]:
            break
        h = graph.horizontal_distance(x[:m], y[:m])
        if h is None:
            continue
        cand = vertical + h
        if best is None or cand <= best[0]:
            best = (cand, m, h)
    if best is None:
        raise InvalidArgument(f"{word_str(x)} and {word_str(y)} are not connected")
    return GeodesicSummary(*best)


def gromov_product(graph: LeveledGraph, x, y) -> Fraction:
    x, y = as_word(x), as_word(y)
    return Fraction(len(x) + len(y) - geodesic(graph, x, y).distance, 2)


def hyperbolic_metric(graph: LeveledGraph, x, y, a) -> float:
    """``exp(-a |x ∧ y|)`` for distinct vertices, 0 on the diagonal."""
    x, y = as_word(x), as_word(y)
    if not a > 0:
        raise InvalidArgument("metric parameter must be positive")
    if x == y:
        return 0.0
    return math.exp(-float(a) * float(gromov_product(graph, x, y)))


def _ancestor_table(graph: LeveledGraph, words: Sequence[Word], levels: range) -> np.ndarray:
    table = np.full((len(words), len(graph.levels)), -1, dtype=np.int64)
    idx = graph._index
    for i, w in enumerate(words):
        for m in levels:
            if m > len(w):
                break
            table[i, m] = idx[w[:m]]
    return table


def distance_matrix(graph: LeveledGraph, rows: Sequence[Word], cols: Optional[Sequence[Word]] = None,
                    with_horizontal: bool = False):
    """Vectorised canonical-geodesic distances between word lists.

    With ``with_horizontal`` also returns the horizontal part of each
    canonical geodesic (smallest bend level on ties).
    """
    rows = [tuple(r) for r in rows]
    cols = rows if cols is None else [tuple(c) for c in cols]
    lr = np.array([len(w) for w in rows], dtype=np.int32)
    lc = np.array([len(w) for w in cols], dtype=np.int32)
    top_level = max(lr.max(initial=0), lc.max(initial=0))
    span = range(graph.top, int(top_level) + 1)
    ar = _ancestor_table(graph, rows, span)
    ac = ar if cols is rows else _ancestor_table(graph, cols, span)
    best = np.full((len(rows), len(cols)), BIG, dtype=np.int32)
    besth = np.zeros_like(best)
    base = lr[:, None] + lc[None, :]
    for m in span:
        r_ok = ar[:, m] >= 0
        c_ok = ac[:, m] >= 0
        if not r_ok.any() or not c_ok.any():
            break
        h = graph.level_distance_matrix(m)
        hm = h[np.ix_(np.where(r_ok, ar[:, m], 0), np.where(c_ok, ac[:, m], 0))]
        hm = np.where(r_ok[:, None] & c_ok[None, :], hm, BIG)
        cand = np.minimum(base - 2 * m + hm, BIG)
        better = cand < best
        best = np.where(better, cand, best)
        besth = np.where(better, hm, besth)
    if with_horizontal:
        return best, besth
    return best


def quotient_product_matrix(graph: LeveledGraph, words: Sequence[Word]) -> np.ndarray:
    """``|⌊x⌋ ∧ ⌊y⌋|``: deepest level where the ancestors share a component."""
    words = [tuple(w) for w in words]
    n = len(words)
    comp_ids = {}
    for m in range(graph.top, graph.depth + 1):
        for i, c in enumerate(graph.components(m)):
            for v in c:
                comp_ids[v] = i
    q = np.full((n, n), -1, dtype=np.int32)
    lengths = np.array([len(w) for w in words])
    for m in range(graph.top, int(lengths.max(initial=0)) + 1):
        ids = np.array([comp_ids[w[:m]] if len(w) >= m else -1 for w in words])
        same = (ids[:, None] == ids[None, :]) & (ids[:, None] >= 0)
        q = np.where(same, m, q)
    return q


def explicit_distances(graph: LeveledGraph, source: Word) -> Dict[Word, int]:
    """Plain breadth-first search over vertical and horizontal edges."""
    source = tuple(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        nbrs = list(graph.neighbors(x)) + graph.children(x)
        if len(x) > graph.top:
            nbrs.append(x[:-1])
        for y in nbrs:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


# -- quotient tree and comparisons ------------------------------------------

def quotient_tree(graph: LeveledGraph) -> LeveledGraph:
    """Tree of horizontal components; ``members`` maps each vertex to its component."""
    if graph.top:
        raise InvalidArgument("quotient tree needs a rooted graph")
    word_of = {(ROOT,): ROOT}
    levels = [[ROOT]]
    members = {ROOT: (ROOT,)}
    for n in range(1, graph.depth + 1):
        by_parent = defaultdict(list)
        for comp in graph.components(n):
            by_parent[graph.component_of(comp[0][:-1])].append(comp)
        level = []
        for pcomp, comps in by_parent.items():
            pword = word_of[pcomp]
            for i, comp in enumerate(sorted(comps), start=1):
                w = pword + (i,)
                word_of[comp] = w
                members[w] = comp
                level.append(w)
        levels.append(level)
    return LeveledGraph(levels, {}, graph.alphabet_size, "Quotient", members=members)


@dataclass(frozen=True)
class SandwichReport:
    """Comparison of Gromov products in the graph and in its quotient tree.

    ``holds`` is the two-sided inequality
    ``|⌊x⌋∧⌊y⌋| <= |x∧y| <= |⌊x⌋∧⌊y⌋| + k``; ``min_gap``/``max_gap`` are the
    extreme values of ``|x∧y| - |⌊x⌋∧⌊y⌋|`` over the checked pairs.
    Because a canonical geodesic bends inside a single component, the
    product in the graph never exceeds the quotient one; ``reverse_holds``
    is the inequality ``|⌊x⌋∧⌊y⌋| - k <= |x∧y| <= |⌊x⌋∧⌊y⌋|``.
    """

    holds: bool
    reverse_holds: bool
    k: int
    min_gap: Fraction
    max_gap: Fraction
    pairs: int
    lower_violations: int
    upper_violations: int


def gromov_sandwich_check(graph: LeveledGraph, depth: Optional[int] = None) -> SandwichReport:
    words = graph.vertices(depth)
    k = graph.max_component_size(depth)
    dist = distance_matrix(graph, words)
    lengths = np.array([len(w) for w in words], dtype=np.int64)
    twice = lengths[:, None] + lengths[None, :] - dist  # 2 |x ∧ y|
    twice_q = 2 * quotient_product_matrix(graph, words).astype(np.int64)
    diff = twice - twice_q
    iu = np.triu_indices(len(words))
    d = diff[iu]
    lower = int((d < 0).sum())
    upper = int((d > 2 * k).sum())
    reverse = bool(((d <= 0) & (d >= -2 * k)).all())
    return SandwichReport(lower == 0 and upper == 0, reverse, k, Fraction(int(d.min()), 2),
                          Fraction(int(d.max()), 2), len(d), lower, upper)


@dataclass(frozen=True)
class MetricReport:
    holds: bool
    reverse_holds: bool
    c: float
    min_ratio: float
    max_ratio: float
    pairs: int


def metric_comparison_check(graph: LeveledGraph, a: float, depth: Optional[int] = None) -> MetricReport:
    """``c ρ_a(⌊x⌋,⌊y⌋) <= ρ_a(x,y) <= ρ_a(⌊x⌋,⌊y⌋)`` for ``⌊x⌋ ≠ ⌊y⌋``, ``c = e^{-ka}``.

    The ratios reported are ``ρ_a(x,y) / ρ_a(⌊x⌋,⌊y⌋)``; ``reverse_holds``
    checks ``ρ_a(⌊x⌋,⌊y⌋) <= ρ_a(x,y) <= e^{ka} ρ_a(⌊x⌋,⌊y⌋)``.
    """
    words = graph.vertices(depth)
    k = graph.max_component_size(depth)
    dist = distance_matrix(graph, words)
    lengths = np.array([len(w) for w in words], dtype=np.int64)
    prod = (lengths[:, None] + lengths[None, :] - dist) / 2.0
    q = quotient_product_matrix(graph, words)
    comp = {}
    for n in range(graph.top, graph.depth + 1):
        for c in graph.components(n):
            for v in c:
                comp[v] = c
    ids = {c: i for i, c in enumerate(set(comp.values()))}
    cid = np.array([ids[comp[w]] for w in words])
    mask = cid[:, None] != cid[None, :]
    mask &= np.triu(np.ones_like(mask), 1).astype(bool)
    ratio = np.exp(-a * (prod - q))[mask]
    c = math.exp(-k * a)
    eps = 1e-12
    holds = bool(((ratio >= c - eps) & (ratio <= 1 + eps)).all())
    reverse = bool(((ratio >= 1 - eps) & (ratio <= (1 + eps) / c)).all())
    return MetricReport(holds, reverse, c, float(ratio.min(initial=1.0)), float(ratio.max(initial=1.0)),
                        int(mask.sum()))


@dataclass(frozen=True)
class HyperbolicityWitness:
    max_horizontal_part: int
    delta_estimate: Fraction
    sampled: bool


def hyperbolicity_witness(graph: LeveledGraph, pair_budget: int = 10 ** 6, middle_sample: int = 256,
                          seed: int = 20140214) -> HyperbolicityWitness:
    """Longest horizontal run of a canonical geodesic and an estimate of δ.

    δ is exact over all triples while the number of vertex pairs is within
    ``pair_budget``; above it the middle vertex of each triple ranges over a
    level-stratified sample of about ``middle_sample`` vertices.
    """
    words = graph.vertices()
    dist, hpart = distance_matrix(graph, words, with_horizontal=True)
    lengths = np.array([len(w) for w in words], dtype=np.int64)
    twice = lengths[:, None] + lengths[None, :] - dist.astype(np.int64)
    n = len(words)
    middles = list(range(n))
    sampled = n * n > pair_budget
    if sampled:
        rng = random.Random(seed)
        by_level = defaultdict(list)
        for i, w in enumerate(words):
            by_level[len(w)].append(i)
        quota = max(1, middle_sample // len(by_level))
        middles = sorted(i for lvl in sorted(by_level) for i in
                         rng.sample(by_level[lvl], min(quota, len(by_level[lvl]))))
    worst = 0
    for z in middles:
        m = np.minimum(twice[:, z][:, None], twice[z, :][None, :]) - twice
        worst = max(worst, int(m.max()))
    return HyperbolicityWitness(int(hpart.max(initial=0)), Fraction(worst, 2), sampled)


# -- DOT --------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def export_dot(graph: LeveledGraph, levels: Optional[Tuple[int, int]] = None) -> str:
    """DOT text: vertical edges directed parent->child, horizontal ones undirected."""
    lo, hi = levels if levels is not None else (graph.top, graph.depth)
    lines = ["digraph augmented_tree {",
             f"  graph [alphabet_size={graph.alphabet_size}, source={_q(graph.source)}, "
             f"top={graph.top}, depth={graph.depth}, lo={lo}, hi={hi}];"]
    for n in range(lo, hi + 1):
        for v in graph.levels[n]:
            label = word_str(v)
            if graph.members is not None:
                label += " = {" + ",".join(word_str(x) for x in graph.members[v]) + "}"
            lines.append(f"  {_q(word_str(v) if v else 'o')} [word={_q(repr(v))}, label={_q(label)}];")
    for n in range(lo + 1, hi + 1):
        for v in graph.levels[n]:
            if n > graph.top:
                lines.append(f"  {_q(word_str(v[:-1]))} -> {_q(word_str(v))};")
    for n in range(lo, hi + 1):
        for a, b in graph.edges(n):
            lines.append(f"  {_q(word_str(a))} -> {_q(word_str(b))} [dir=none, kind=horizontal];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_quotient_dot(graph: LeveledGraph) -> str:
    return export_dot(quotient_tree(graph))


_NODE = re.compile(r'^\s*"((?:[^"\\]|\\.)*)"\s*\[word="((?:[^"\\]|\\.)*)"')
_EDGE = re.compile(r'^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*(\[[^\]]*\])?')
_ATTR = re.compile(r'(\w+)=("(?:[^"\\]|\\.)*"|[^,\]\s]+)')


def read_dot(text: str) -> LeveledGraph:
    """Rebuild a graph written by :func:`export_dot` (full level range)."""
    attrs = {}
    words = {}
    edges = []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("graph ["):
            attrs = {k: v.strip('"') for k, v in _ATTR.findall(s)}
            continue
        m = _NODE.match(line)
        if m:
            words[m.group(1)] = ast.literal_eval(m.group(2).replace('\\"', '"'))
            continue
        m = _EDGE.match(line)
        if m and m.group(3) and "horizontal" in m.group(3):
            edges.append((m.group(1), m.group(2)))
    top = int(attrs.get("top", 0))
    depth = int(attrs.get("depth", max(len(w) for w in words.values())))
    levels = [[] for _ in range(depth + 1)]
    for w in words.values():
        levels[len(w)].append(w)
    horizontal = {}
    for a, b in edges:
        _add_edge(horizontal, words[a], words[b])
    graph = LeveledGraph(levels, horizontal, int(attrs.get("alphabet_size", 0)),
                         attrs.get("source", "ExplicitRule"), top)
    check_closure(graph)
    return graph
