"""Near-isometries from augmented trees onto trees, built level by level.

Three constructions are provided.

* :func:`sigma_primitive` maps the subtree hanging from one component,
  whose incidence matrix is primitive, onto a union of copies of the
  ``N``-ary tree in which every ``u`` consecutive vertices of a level are
  joined (``u`` the gcd of the class sizes).  Each class-``i`` component
  passes its children on in ``u_i/u`` groups of total size ``uN``.  Group
  ``k`` fills the children of the ``k``-th run of ``u`` image vertices.
* :func:`sigma_general` handles any simple tree by recursion on the
  blocks of the Frobenius form.  A component opening a non-primitive block
  keeps all of its image under one parent.  The children of its own block
  go below single image vertices (a quasi rearrangement), and everything
  else fills the leftover slots.
* :func:`sigma_union` is the explicit index shuffle that identifies the
  ``N``-ary tree with a union of ``l`` copies of itself.

Every choice left open is resolved in lexicographic order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .augtree import (
    LeveledGraph, _add_edge, check_closure, distance_matrix, plain_tree, subgraph, telescope,
    vertical_only)
from .classes import ClassificationReport, classify
from .errors import (
    CapacityViolation, DivisibilityViolation, InsufficientDepth, InvalidArgument, NotPrimitive,
    NotSimple, QuasiRearrangeFailed, RearrangeFailed)
from .matstruct import frobenius_form, is_primitive, lemma41_exponent, submatrix
from .rearrange import power_rearrange, solve_quasi
from .words import ROOT, Word, word_str


@dataclass
class TargetY:
    copies: int
    block: int
    graph: LeveledGraph


def build_target(copies: int, block: int, n: int, depth: int) -> TargetY:
    """Union of ``copies`` ``n``-ary trees; runs of ``block`` consecutive vertices are paths."""
    if copies < 1 or block < 1 or copies % block:
        raise DivisibilityViolation(f"block size {block} does not divide the number of copies {copies}")
    tree = plain_tree(list(range(1, n + 1)), depth, copies=copies)
    horizontal = {}
    for level in tree.levels[1:]:
        for start in range(0, len(level), block):
            run = level[start:start + block]
            for a, b in zip(run, run[1:]):
                _add_edge(horizontal, a, b)
    graph = LeveledGraph(tree.levels, horizontal, n, "Union")
    check_closure(graph)
    return TargetY(copies, block, graph)


@dataclass
class SigmaMap:
    kind: str
    domain: LeveledGraph
    target: LeveledGraph
    mapping: Dict[Word, Word]
    exceptions_domain: Tuple[Word, ...] = ()
    exceptions_target: Tuple[Word, ...] = ()
    level_preserving: bool = True
    measured_distortion: Optional[int] = None
    depths_checked: List[int] = field(default_factory=list)
    exhaustive: bool = True
    details: dict = field(default_factory=dict)

    def __call__(self, word: Word) -> Word:
        return self.mapping[tuple(word)]

    def certificate(self) -> dict:
        return {
            "kind": self.kind,
            "target": {"source": self.target.source, "alphabet_size": self.target.alphabet_size,
                       "depth": self.target.depth, "copies": len(self.target.levels[1])
                       if self.target.depth >= 1 else 0},
            "exceptions": {"domain": [word_str(w) for w in self.exceptions_domain],
                           "target": [word_str(w) for w in self.exceptions_target]},
            "measured_distortion": self.measured_distortion,
            "depths_checked": list(self.depths_checked),
            "exhaustive": self.exhaustive,
            "details": self.details,
        }


# -- distortion -------------------------------------------------------------

@dataclass(frozen=True)
class DistortionReport:
    distortion: int
    gromov_deviation: float
    level_shift: int
    pairs: int
    exhaustive: bool


def verify_distortion(sigma: SigmaMap, depth: Optional[int] = None, pair_budget: int = 4_000_000,
                      seed: int = 7, target: Optional[LeveledGraph] = None) -> DistortionReport:
    """``max |d(σx, σy) - d(x, y)|`` over domain vertices up to ``depth``.

    Exhaustive when the pair count fits ``pair_budget``; otherwise rows are
    a fixed-seed sample of the domain and columns range over all of it.
    ``target`` lets the same map be measured against another edge set on
    the target vertices.
    """
    tgt = sigma.target if target is None else target
    words = sorted((w for w in sigma.mapping if depth is None or len(w) <= depth),
                   key=lambda w: (len(w), w))
    images = [sigma.mapping[w] for w in words]
    n = len(words)
    exhaustive = n * n <= pair_budget
    rows = list(range(n))
    if not exhaustive:
        rows = sorted(random.Random(seed).sample(range(n), max(1, pair_budget // n)))
    row_words = [words[i] for i in rows]
    row_images = [images[i] for i in rows]
    d1 = distance_matrix(sigma.domain, row_words, words).astype(np.int64)
    d2 = distance_matrix(tgt, row_images, images).astype(np.int64)
    diff = np.abs(d2 - d1)
    lx = np.array([len(w) for w in row_words])[:, None] + np.array([len(w) for w in words])[None, :]
    ly = np.array([len(w) for w in row_images])[:, None] + np.array([len(w) for w in images])[None, :]
    gromov = np.abs((ly - d2) - (lx - d1)) / 2.0
    shift = max((abs(len(a) - len(b)) for a, b in zip(words, images)), default=0)
    report = DistortionReport(int(diff.max(initial=0)), float(gromov.max(initial=0.0)), shift,
                              len(rows) * n, exhaustive)
    if target is None:
        sigma.measured_distortion = report.distortion
        sigma.exhaustive = exhaustive
        top = max((len(w) for w in words), default=0)
        if top not in sigma.depths_checked:
            sigma.depths_checked.append(top)
    return report


def check_bijective(sigma: SigmaMap, depth: Optional[int] = None) -> bool:
    """Injective, and for level-preserving maps onto every full target level."""
    words = [w for w in sigma.mapping if depth is None or len(w) <= depth]
    images = [sigma.mapping[w] for w in words]
    if len(set(images)) != len(images):
        return False
    if not sigma.level_preserving:
        return True
    by_level = {}
    for w in images:
        by_level.setdefault(len(w), set()).add(w)
    excluded = set(sigma.exceptions_target)
    for n, got in by_level.items():
        expected = set(sigma.target.levels[n]) - excluded
        if got != expected:
            return False
    return True


# -- recursive embedding ----------------------------------------------------

class _Plan:
    """Per-class decisions derived from the incidence matrix."""

    def __init__(self, report: ClassificationReport, n: int):
        self.report = report
        self.n = n
        a = report.incidence
        m = len(a)
        self.u = report.sizes
        self.reach = []
        for i in range(m):
            seen, stack = {i}, [i]
            while stack:
                x = stack.pop()
                for j in range(m):
                    if a[x][j] and j not in seen:
                        seen.add(j)
                        stack.append(j)
            self.reach.append(tuple(sorted(seen)))
        self.mode = {}
        self.groups = {}
        self.block = {}
        self.gcd = {}
        for i in range(m):
            sub = submatrix(a, self.reach[i])
            if is_primitive(sub):
                self.mode[i] = "primitive"
                self._primitive(i)
            else:
                self.mode[i] = "first-block"
                self._first_block(i)

    def _primitive(self, i):
        idx = self.reach[i]
        sub = submatrix(self.report.incidence, idx)
        us = [self.u[j] for j in idx]
        g = reduce(math.gcd, us)
        self.gcd[i] = g
        res = power_rearrange(sub, us, self.n, k_budget=1)
        if res is None:
            raise RearrangeFailed(f"class {i + 1}: incidence rows do not split into groups of weight {g * self.n}")
        self.groups[i] = [(idx, c) for c in [res.matrices[idx.index(i)]]][0]

    def _first_block(self, i):
        a = self.report.incidence
        idx = self.reach[i]
        form = frobenius_form(submatrix(a, idx))
        local = idx.index(i)
        block = next(b for b in form.blocks if local in b)
        members = tuple(idx[j] for j in block)
        self.block[i] = members
        row = [a[i][j] for j in members]
        weights = [self.u[j] for j in members]
        if not any(row):
            self.groups[i] = (members, [[0] * len(members) for _ in range(self.u[i])])
            return
        c = solve_quasi(row, weights, self.n, self.u[i])
        if c is None:
            raise QuasiRearrangeFailed(f"class {i + 1}: row {row} is not ({self.n}, {weights})-quasi-rearrangeable "
                                       f"into {self.u[i]} groups")
        self.groups[i] = (members, c)


class _Embedder:
    def __init__(self, graph: LeveledGraph, report: ClassificationReport, depth: int, n: int):
        self.graph = graph
        self.report = report
        self.depth = depth
        self.n = n
        self.plan = _Plan(report, n)
        self.mapping: Dict[Word, Word] = {}
        self.cohesive: List[Tuple[Word, ...]] = []

    def class_of(self, comp):
        try:
            return self.report.class_of[comp]
        except KeyError:
            raise InsufficientDepth(f"no class known for component {[word_str(w) for w in comp]}") from None

    def embed(self, comp, slots):
        queue = [(comp, list(slots))]
        while queue:
            comp, slots = queue.pop()
            for v, s in zip(comp, slots):
                self.mapping[v] = s
            if len(comp[0]) >= self.depth:
                continue
            queue.extend(self._children(comp, slots))

    def _children(self, comp, slots):
        i = self.class_of(comp)
        kids = self.report.children[comp]
        child_slots = [[s + (c,) for c in range(1, self.n + 1)] for s in slots]
        by_class = {}
        for d in sorted(kids):
            by_class.setdefault(self.class_of(d), []).append(d)
        members, c = self.plan.groups[i]
        out = []
        if self.plan.mode[i] == "primitive":
            g = self.plan.gcd[i]
            pools = {j: list(by_class.get(j, [])) for j in members}
            for r, row in enumerate(c):
                run = [x for s in child_slots[r * g:(r + 1) * g] for x in s]
                chosen = []
                for j, cnt in zip(members, row):
                    chosen.extend(pools[j][:cnt])
                    pools[j] = pools[j][cnt:]
                pos = 0
                for d in sorted(chosen):
                    out.append((d, run[pos:pos + len(d)]))
                    pos += len(d)
                if pos != len(run):
                    raise CapacityViolation("group weight differs from its slot count")
            if any(pools.values()):
                raise CapacityViolation("components left over after grouping")
            return out
        # first-block mode
        self.cohesive.append(comp)
        pools = {j: list(by_class.pop(j, [])) for j in members}
        used = set()
        for r, row in enumerate(c):
            chosen = []
            for j, cnt in zip(members, row):
                chosen.extend(pools[j][:cnt])
                pools[j] = pools[j][cnt:]
            pos = 0
            for d in sorted(chosen):
                run = child_slots[r][pos:pos + len(d)]
                if len(run) != len(d):
                    raise CapacityViolation("quasi group exceeds the children of its slot")
                out.append((d, run))
                used.update(run)
                pos += len(d)
        if any(pools.values()):
            raise CapacityViolation("first-block components left over after grouping")
        leftover = [x for s in child_slots for x in s if x not in used]
        later = sorted(d for ds in by_class.values() for d in ds)
        need = sum(len(d) for d in later)
        if need != len(leftover):
            raise CapacityViolation(f"{need} vertices of later classes for {len(leftover)} free slots")
        pos = 0
        for d in later:
            out.append((d, leftover[pos:pos + len(d)]))
            pos += len(d)
        return out


def _truncate(graph: LeveledGraph, depth: int) -> LeveledGraph:
    if depth >= graph.depth:
        return graph
    keep = {v for level in graph.levels[:depth + 1] for v in level}
    horizontal = {v: frozenset(w for w in n if w in keep) for v, n in graph.horizontal.items() if v in keep}
    return LeveledGraph([list(l) for l in graph.levels[:depth + 1]], horizontal, graph.alphabet_size,
                        graph.source, graph.top)


def _classified(graph: LeveledGraph, depth: int) -> ClassificationReport:
    budget = depth - graph.top - (0 if graph.top else 1)
    budget = max(1, budget)
    if graph.depth < graph.top + budget + 2:
        raise InsufficientDepth(f"graph depth {graph.depth} must exceed the map depth {depth} by 2")
    report = classify(graph, budget)
    if not report.simple:
        raise NotSimple("classification is inconclusive; no near-isometry is constructed")
    return report


def sigma_primitive(graph: LeveledGraph, component: Sequence[Word], depth: int) -> SigmaMap:
    """Map ``T_D`` onto copies of the tree with runs of ``u`` consecutive vertices joined.

    ``graph`` must be built at least two levels below ``depth``.
    """
    comp = tuple(sorted(tuple(w) for w in component))
    view = subgraph(graph, comp)
    report = _classified(view, depth)
    n = graph.alphabet_size
    if not is_primitive(report.incidence):
        raise NotPrimitive("incidence matrix of the subtree is not primitive")
    g = reduce(math.gcd, report.sizes)
    res = power_rearrange(report.incidence, report.sizes, n, k_budget=6)
    if res is None:
        raise RearrangeFailed("no power of the incidence matrix is rearrangeable within budget")
    if res.k > 1:
        raise RearrangeFailed(f"rearrangement needs the {res.k}-th power; telescope the graph by {res.k} first")
    top = len(comp[0])
    target = build_target(len(comp), g, n, depth - top + 1)
    emb = _Embedder(view, report, depth, n)
    offset = top - 1
    # Target words are shorter by ``offset``; embed with padded slots, then strip.
    pad = (0,) * offset
    slots = [pad + w for w in target.graph.levels[1]]
    emb.embed(comp, slots)
    mapping = {x: y[offset:] for x, y in emb.mapping.items()}
    domain = _truncate(view, depth)
    sigma = SigmaMap("primitive", domain, target.graph, mapping, (), (ROOT,), False,
                     details={"copies": len(comp), "block": g, "k": res.k,
                              "component": [word_str(w) for w in comp]})
    return sigma


def sigma_general(graph: LeveledGraph, depth: int, report: Optional[ClassificationReport] = None) -> SigmaMap:
    """Map a simple augmented tree onto the bare tree on the same vertex set.

    Level ``1`` is fixed (``σ(i) = i``).  Classes whose reachable incidence
    is primitive pass on children in consecutive groups.  The others keep
    their own block below single parents and fill the leftover slots with
    the later classes.  When the block powers need it, the graph is first
    telescoped by the exponent that makes every diagonal block primitive or
    zero; ``depth`` then counts telescoped levels.
    """
    if graph.top:
        raise InvalidArgument("sigma_general needs a rooted graph")
    if report is None or not report.class_of:
        report = _classified(graph, depth)
    if not report.simple:
        raise NotSimple("classification is inconclusive")
    ell, _ = lemma41_exponent(report.incidence)
    work = graph
    if ell > 1:
        usable = graph.depth - graph.depth % ell
        work = telescope(_truncate(graph, usable), ell)
        report = _classified(work, depth)
    n = work.alphabet_size
    emb = _Embedder(work, report, depth, n)
    for comp in work.components(1):
        emb.embed(comp, list(comp))
    domain = _truncate(work, depth)
    target = vertical_only(domain)
    mapping = {ROOT: ROOT}
    mapping.update(emb.mapping)
    sigma = SigmaMap("general", domain, target, mapping, (), (), True,
                     details={"telescope": ell, "modes": {str(i + 1): m for i, m in emb.plan.mode.items()},
                              "first_block_components": len(emb.cohesive)})
    sigma._cohesive = emb.cohesive
    return sigma


def _index_word(s: int, n: int) -> Word:
    """``s``-th word (1-based) of ``1, ..., N-1, N1, ..., N(N-1), N^2 1, ...``."""
    q, r = divmod(s - 1, n - 1)
    return (n,) * q + (r + 1,)


def _index_of(word: Word, n: int):
    q = 0
    while q < len(word) and word[q] == n:
        q += 1
    if q == len(word):
        return None, q
    return q * (n - 1) + word[q], q


def sigma_union(n: int, copies: int, depth: int) -> SigmaMap:
    """The shuffle from the ``N``-ary tree onto ``copies`` copies of it under a new root.

    ``σ(i_s w) = j_s w`` where ``i_s`` runs through the words with a single
    non-``N`` symbol at the end, ``j_1..j_{l-1}`` are the first ``l - 1``
    copy roots, and afterwards ``j_s`` is the ``l``-th copy root followed by
    ``i_{s-l+1}``; the all-``N`` words go to ``o_l N^i``.
    """
    if n < 2 or copies < 1:
        raise InvalidArgument("need N >= 2 and at least one copy")
    domain = plain_tree(list(range(1, n + 1)), depth)
    target = plain_tree(list(range(1, n + 1)), depth + 1, copies=copies)
    mapping = {}
    for level in domain.levels[1:]:
        for w in level:
            s, q = _index_of(w, n)
            if s is None:
                mapping[w] = (copies,) + (n,) * (q - 1)
                continue
            rest = w[q + 1:]
            if s <= copies - 1:
                mapping[w] = (s,) + rest
            else:
                mapping[w] = (copies,) + _index_word(s - copies + 1, n) + rest
    return SigmaMap("union", domain, target, mapping, (ROOT,), (ROOT,), False,
                    details={"N": n, "copies": copies, "bound": copies // n + 1})


def first_block_cohesion(sigma: SigmaMap) -> bool:
    """Images of every component opening a non-primitive block share one parent."""
    for comp in getattr(sigma, "_cohesive", []):
        parents = {sigma.mapping[v][:-1] for v in comp if v in sigma.mapping}
        if len(parents) > 1:
            return False
    return True
