"""Job configuration: JSON text with rationals written as ``"p/q"`` strings.

Floats are refused everywhere because the geometry is exact.  Every
semantic error is reported at the line and column of the offending value.

Source kinds::

    {"type": "ifs", "ratio": "1/5", "maps": [{"rotation": [[1]], "translation": ["0"]}, ...]}
    {"type": "explicit", "n": 2, "edges": [["11", "12"]]}
    {"type": "chain", "levels": [1, 3, 6, 10]}
    {"type": "union", "sources": [<ifs>, <ifs>, ...]}
    {"type": "cantor_union", "alpha": "1/4"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .errors import InvalidSystem, ParseError
from .geometry import Box, Similitude, SimilitudeSystem, is_orthogonal
from .words import parse_word

Path = Tuple[Any, ...]


# -- positions --------------------------------------------------------------

_WS = " \t\r\n"


class _Spans:
    """Records the start offset of every value, keyed by its JSON path."""

    def __init__(self, text: str):
        self.text = text
        self.at: Dict[Path, int] = {}
        self.decoder = json.JSONDecoder()

    def _skip(self, i):
        while i < len(self.text) and self.text[i] in _WS:
            i += 1
        return i

    def value(self, i, path):
        i = self._skip(i)
        self.at[path] = i
        ch = self.text[i:i + 1]
        if ch == "{":
            i = self._skip(i + 1)
            if self.text[i] == "}":
                return i + 1
            while True:
                key, i = json.decoder.scanstring(self.text, self._skip(i) + 1)
                i = self._skip(i) + 1  # colon
                i = self._skip(self.value(i, path + (key,)))
                if self.text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = self._skip(i + 1)
            if self.text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = self._skip(self.value(i, path + (k,)))
                k += 1
                if self.text[i] == "]":
                    return i + 1
                i += 1
        _, end = self.decoder.raw_decode(self.text, i)
        return end

    def where(self, path: Path):
        while path and path not in self.at:
            path = path[:-1]
        offset = self.at.get(path, 0)
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column


class _Reader:
    def __init__(self, text: str):
        self.spans = _Spans(text)
        self.spans.value(0, ())

    def fail(self, path: Path, message: str):
        line, col = self.spans.where(path)
        raise ParseError(message, line, col, "/".join(str(p) for p in path))

    def rational(self, value, path, what="rational") -> Fraction:
        if isinstance(value, bool) or isinstance(value, float):
            self.fail(path, f"{what} required: write numbers as integers or \"p/q\" strings")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            try:
                if any(c in value for c in ".eE"):
                    raise ValueError
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                self.fail(path, f"{what} required, got {value!r}")
        self.fail(path, f"{what} required, got {type(value).__name__}")

    def integer(self, value, path, minimum=None) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, "integer required")
        if minimum is not None and value < minimum:
            self.fail(path, f"must be at least {minimum}")
        return value

    def obj(self, value, path) -> dict:
        if not isinstance(value, dict):
            self.fail(path, "object required")
        return value

    def array(self, value, path) -> list:
        if not isinstance(value, list):
            self.fail(path, "array required")
        return value


# -- config -----------------------------------------------------------------

@dataclass
class Budgets:
    refine: int = 12
    classes: Optional[int] = None
    k: int = 6
    pairs: int = 4_000_000


@dataclass
class JobConfig:
    kind: str
    source: Any
    depth: int = 6
    budgets: Budgets = field(default_factory=Budgets)
    metric_a: Optional[Fraction] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)


def _system(r: _Reader, node, path) -> SimilitudeSystem:
    node = r.obj(node, path)
    map_nodes = r.array(node.get("maps"), path + ("maps",))
    if len(map_nodes) < 2:
        r.fail(path + ("maps",), "at least 2 maps are required")
    default_ratio = node.get("ratio")
    maps = []
    for i, m in enumerate(map_nodes):
        mp = path + ("maps", i)
        m = r.obj(m, mp)
        ratio_value = m.get("ratio", default_ratio)
        if ratio_value is None:
            r.fail(mp, "missing contraction ratio")
        ratio = r.rational(ratio_value, mp + ("ratio",) if "ratio" in m else path + ("ratio",))
        rot = r.array(m.get("rotation"), mp + ("rotation",))
        rotation = []
        for a, row in enumerate(rot):
            row = r.array(row, mp + ("rotation", a))
            rotation.append([r.rational(x, mp + ("rotation", a, b), "rational orthogonal")
                             for b, x in enumerate(row)])
        if not rotation or any(len(row) != len(rotation) for row in rotation) or not is_orthogonal(rotation):
            r.fail(mp + ("rotation",), "rational orthogonal required")
        trans = r.array(m.get("translation"), mp + ("translation",))
        if len(trans) != len(rotation):
            r.fail(mp + ("translation",), "translation length differs from the dimension")
        translation = [r.rational(x, mp + ("translation", b)) for b, x in enumerate(trans)]
        maps.append(Similitude.make(ratio, rotation, translation))
    labels = node.get("labels")
    if labels is not None:
        labels = [r.integer(x, path + ("labels", i)) for i, x in enumerate(r.array(labels, path + ("labels",)))]
    box = None
    if "box" in node:
        b = r.obj(node["box"], path + ("box",))
        lo = [r.rational(x, path + ("box", "lo", i)) for i, x in enumerate(r.array(b.get("lo"), path + ("box", "lo")))]
        hi = [r.rational(x, path + ("box", "hi", i)) for i, x in enumerate(r.array(b.get("hi"), path + ("box", "hi")))]
        box = Box(tuple(lo), tuple(hi))
    try:
        return SimilitudeSystem(tuple(maps), box, tuple(labels) if labels else None)
    except InvalidSystem as exc:
        r.fail(path, str(exc))


def _source(r: _Reader, node, path):
    node = r.obj(node, path)
    kind = node.get("type")
    if kind == "ifs":
        return kind, _system(r, node, path)
    if kind == "explicit":
        n = r.integer(node.get("n"), path + ("n",), 2)
        edges = []
        for i, e in enumerate(r.array(node.get("edges", []), path + ("edges",))):
            e = r.array(e, path + ("edges", i))
            if len(e) != 2 or not all(isinstance(x, str) for x in e):
                r.fail(path + ("edges", i), "edge must be a pair of words")
            try:
                edges.append((parse_word(e[0]), parse_word(e[1])))
            except ValueError as exc:
                r.fail(path + ("edges", i), str(exc))
        return kind, (n, edges)
    if kind == "chain":
        levels = [r.integer(x, path + ("levels", i), 1)
                  for i, x in enumerate(r.array(node.get("levels"), path + ("levels",)))]
        return kind, tuple(levels)
    if kind == "union":
        parts = r.array(node.get("sources"), path + ("sources",))
        if len(parts) < 1:
            r.fail(path + ("sources",), "at least one source required")
        systems = []
        for i, p in enumerate(parts):
            sub = path + ("sources", i)
            k, system = _source(r, p, sub)
            if k != "ifs":
                r.fail(sub, "union members must be ifs sources")
            systems.append(system)
        return kind, systems
    if kind == "cantor_union":
        alpha = r.rational(node.get("alpha"), path + ("alpha",))
        if alpha <= 0:
            r.fail(path + ("alpha",), "alpha must be positive")
        return kind, alpha
    r.fail(path + ("type",), f"unknown source type {kind!r}")


def parse_config(text: str) -> JobConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    r = _Reader(text)
    data = r.obj(data, ())
    if "source" not in data:
        r.fail((), "missing \"source\"")
    kind, source = _source(r, data["source"], ("source",))
    cfg = JobConfig(kind, source)
    if "depth" in data:
        cfg.depth = r.integer(data["depth"], ("depth",), 1)
    b = r.obj(data.get("budgets", {}), ("budgets",))
    if "refine" in b:
        cfg.budgets.refine = r.integer(b["refine"], ("budgets", "refine"), 1)
    if b.get("classes") is not None:
        cfg.budgets.classes = r.integer(b["classes"], ("budgets", "classes"), 1)
    if "k" in b:
        cfg.budgets.k = r.integer(b["k"], ("budgets", "k"), 1)
    if "pairs" in b:
        cfg.budgets.pairs = r.integer(b["pairs"], ("budgets", "pairs"), 1)
    if data.get("metric_a") is not None:
        cfg.metric_a = r.rational(data["metric_a"], ("metric_a",))
        if cfg.metric_a <= 0:
            r.fail(("metric_a",), "metric parameter must be positive")
    out = r.obj(data.get("outputs", {}), ("outputs",))
    for key, value in out.items():
        if not isinstance(value, str):
            r.fail(("outputs", key), "output path must be a string")
        cfg.outputs[key] = value
    known = {"source", "depth", "budgets", "metric_a", "outputs"}
    cfg.extra = _extras(r, {k: v for k, v in data.items() if k not in known})
    return cfg


def _extras(r: _Reader, extra: dict) -> dict:
    """Optional command inputs: ``matrix``, ``sizes``, ``row``, ``n``, ``p``, ``component``, ``union``."""
    out = {}
    for key, value in extra.items():
        path = (key,)
        if key == "matrix":
            rows = r.array(value, path)
            out[key] = [[r.integer(x, path + (i, j), 0) for j, x in enumerate(r.array(row, path + (i,)))]
                        for i, row in enumerate(rows)]
        elif key in ("sizes", "row"):
            out[key] = [r.integer(x, path + (i,), 0) for i, x in enumerate(r.array(value, path))]
        elif key in ("n", "p", "telescope"):
            out[key] = r.integer(value, path, 1)
        elif key == "quasi":
            if not isinstance(value, bool):
                r.fail(path, "boolean required")
            out[key] = value
        elif key == "component":
            out[key] = [parse_word(w) for w in r.array(value, path)]
        elif key == "union":
            u = r.obj(value, path)
            out[key] = (r.integer(u.get("n"), path + ("n",), 2), r.integer(u.get("copies"), path + ("copies",), 1))
        else:
            r.fail(path, f"unknown key {key!r}")
    return out


def load_config(path: str) -> JobConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
