"""Classification of horizontal components up to isomorphism of their subtrees.

Signatures are refined the way a DFA is minimised.  Step 0 is the
canonical form of a component's own horizontal graph.  Step ``s + 1``
adds the multiset of children, each child described by its step-``s``
signature and by the pattern that says which parent vertex each of its
vertices hangs from (read off in canonical orders of parent and child).
A component at level ``n`` has a meaningful step-``s`` signature when
``n + s`` does not exceed the built depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .augtree import LeveledGraph, subgraph
from .errors import CapExceeded, InsufficientDepth, InvalidArgument, NotSimple
from .words import Word, word_str

SIMPLE = "Simple"
INCONCLUSIVE = "Inconclusive"

Component = Tuple[Word, ...]


@dataclass(frozen=True)
class ClassInfo:
    representative: Component
    size: int
    level: int


@dataclass
class ClassificationReport:
    verdict: str
    budget: int
    classes: List[ClassInfo]
    sizes: List[int]
    incidence: List[List[int]]
    stabilization_depth: int
    refinement_steps: int
    class_count: int
    alphabet_size: int
    class_of: Dict[Component, int] = field(default_factory=dict, repr=False, compare=False)
    children: Dict[Component, List[Component]] = field(default_factory=dict, repr=False, compare=False)

    @property
    def simple(self) -> bool:
        return self.verdict == SIMPLE

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "budget": self.budget,
            "classes": [{"representative": [word_str(w) for w in c.representative],
                         "size": c.size, "level": c.level} for c in self.classes],
            "sizes": list(self.sizes),
            "incidence": [list(r) for r in self.incidence],
            "stabilization_depth": self.stabilization_depth,
            "refinement_steps": self.refinement_steps,
            "class_count": self.class_count,
        }


def _edge_key(comp: Component, order: Sequence[Word], neighbors) -> Tuple:
    pos = {v: i for i, v in enumerate(order)}
    return tuple(sorted((min(pos[v], pos[w]), max(pos[v], pos[w]))
                        for v in comp for w in neighbors(v) if w in pos and pos[v] < pos[w]))


def _base_orders(comp: Component, neighbors, cap: int):
    if len(comp) > cap:
        raise CapExceeded(f"component of size {len(comp)} exceeds the canonical-form cap {cap}")
    if len(comp) == 1:
        return (), [comp]
    best = None
    orders = []
    for order in permutations(comp):
        key = _edge_key(comp, order, neighbors)
        if best is None or key < best:
            best, orders = key, [order]
        elif key == best:
            orders.append(order)
    return best, orders


class _Refiner:
    def __init__(self, graph: LeveledGraph, cap: int):
        self.graph = graph
        self.first = graph.top if graph.top else 1
        self.levels = {}
        self.children = {}
        self.base_key = {}
        self.base_orders = {}
        for n in range(self.first, graph.depth + 1):
            comps = graph.components(n)
            self.levels[n] = comps
            for c in comps:
                key, orders = _base_orders(c, graph.neighbors, cap)
                self.base_key[c] = key
                self.base_orders[c] = orders
                if n < graph.depth:
                    kids = {graph.component_of(x) for v in c for x in graph.children(v)}
                    self.children[c] = sorted(kids)
                else:
                    self.children[c] = []
        # step -> {component: signature id}; step -> {component: canonical orders}
        self.sig = [{}]
        self.orders = [{}]
        table = {}
        for n, comps in self.levels.items():
            for c in comps:
                self.sig[0][c] = table.setdefault((len(c), self.base_key[c]), len(table))
                self.orders[0][c] = self.base_orders[c]

    def step(self):
        s = len(self.sig) - 1
        prev_sig, prev_orders = self.sig[s], self.orders[s]
        sig, orders = {}, {}
        table = {}
        last = self.graph.depth - s - 1
        for n in range(self.first, last + 1):
            for c in self.levels[n]:
                best, chosen = None, []
                for order in self.base_orders[c]:
                    pos = {v: i for i, v in enumerate(order)}
                    desc = []
                    for d in self.children[c]:
                        pattern = min(tuple(pos[v[:-1]] for v in o) for o in prev_orders[d])
                        desc.append((prev_sig[d], pattern))
                    key = (len(c), self.base_key[c], tuple(sorted(desc)))
                    if best is None or key < best:
                        best, chosen = key, [order]
                    elif key == best:
                        chosen.append(order)
                sig[c] = table.setdefault(best, len(table))
                orders[c] = chosen
        self.sig.append(sig)
        self.orders.append(orders)

    def comps_between(self, lo, hi):
        return [c for n in range(lo, hi + 1) for c in self.levels.get(n, [])]


def default_budget(graph: LeveledGraph) -> int:
    return max(1, graph.depth - graph.top - 3)


def classify(graph: LeveledGraph, budget: Optional[int] = None, cap: int = 12) -> ClassificationReport:
    """Classes of components, size vector and incidence matrix.

    Components at levels ``1..budget`` (or ``top..top+budget`` for a
    subgraph view) are compared.  The verdict is ``Simple`` when one more
    refinement step does not split any class there and every child of those
    components falls into a class already present; otherwise
    ``Inconclusive``.  Needs ``depth >= budget + 2`` beyond the top level.
    """
    if budget is None:
        budget = default_budget(graph)
    if budget < 1:
        raise InvalidArgument("budget must be positive")
    lo = graph.top if graph.top else 1
    hi = graph.top + budget
    if graph.depth < hi + 2:
        raise InsufficientDepth(f"depth {graph.depth} is too shallow for budget {budget} (need {hi + 2})")
    t = graph.depth - hi - 1
    ref = _Refiner(graph, cap)
    for _ in range(t + 1):
        ref.step()
    sig_t, sig_next = ref.sig[t], ref.sig[t + 1]
    window = ref.comps_between(lo, hi)

    def group(sig):
        firsts = {}
        for c in window:
            firsts.setdefault(sig[c], c)
        return firsts

    firsts_t = group(sig_t)
    firsts_next = group(sig_next)
    stable = len(firsts_t) == len(firsts_next)
    closed = all(sig_t[d] in firsts_t for c in window for d in ref.children[c])
    verdict = SIMPLE if stable and closed else INCONCLUSIVE

    chosen = firsts_t if verdict == SIMPLE else firsts_next
    sig_used = sig_t if verdict == SIMPLE else sig_next
    order = sorted(chosen.items(), key=lambda kv: (len(kv[1][0]), kv[1]))
    index = {sid: i for i, (sid, _) in enumerate(order)}
    classes = [ClassInfo(rep, len(rep), len(rep[0])) for _, rep in order]
    sizes = [c.size for c in classes]
    incidence = []
    class_of = {}
    if verdict == SIMPLE:
        for sid, rep in order:
            row = [0] * len(order)
            for d in ref.children[rep]:
                row[index[sig_t[d]]] += 1
            incidence.append(row)
        for c, sid in sig_t.items():
            if sid in index:
                class_of[c] = index[sid]
        _check_representatives(window, ref.children, sig_t, index, incidence)
    stabilization = max(c.level for c in classes) if classes else lo
    return ClassificationReport(verdict, budget, classes, sizes, incidence, stabilization, t,
                                len(classes), graph.alphabet_size, class_of, ref.children)


def _check_representatives(window, children, sig, index, incidence):
    for c in window:
        row = [0] * len(index)
        for d in children[c]:
            row[index[sig[d]]] += 1
        if row != incidence[index[sig[c]]]:
            raise AssertionError(f"offspring counts of {[word_str(w) for w in c]} differ from its class")


def verify_eigen(report: ClassificationReport, n: int) -> bool:
    """Exact check of ``A u = N u``."""
    if not report.simple:
        raise NotSimple("eigen identity needs a Simple classification")
    return eigen_identity(report.incidence, report.sizes, n)


def eigen_identity(a: Sequence[Sequence[int]], u: Sequence[int], n: int) -> bool:
    return all(sum(x * y for x, y in zip(row, u)) == n * ui for row, ui in zip(a, u))


def subgraph_incidence(graph: LeveledGraph, component: Sequence[Word],
                       budget: Optional[int] = None) -> ClassificationReport:
    """Classification of ``T_D``, the subtree hanging from ``component`` (itself included)."""
    view = subgraph(graph, component)
    return classify(view, budget)


def class_counts(graph: LeveledGraph, budgets: Sequence[int]) -> List[int]:
    return [classify(graph, b).class_count for b in budgets]
