"""Command line: ``hyperlip <command> --config FILE --depth N [--budget-k K] [--out FILE] [--dot FILE]``.

Every command writes one JSON report (``"schema": "1"``, sorted keys, no
timestamps).  Exit status is 0 on success, 2 when the verdict is
Inconclusive or a construction is infeasible, and 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Tuple

from . import augtree, classes, matstruct, neariso, rearrange
from .catalog import cantor_translate, middle_third
from .config import JobConfig, load_config
from .errors import (
    HyperlipError, InvalidArgument, NotSimple, ParseError, QuasiRearrangeFailed, RearrangeFailed)
from .geometry import INFINITY, condition_h_margin
from .ternary import signed_ternary_expand
from .words import word_str

COMMANDS = ("build", "components", "classify", "incidence", "frobenius", "rearrange", "near-isometry",
            "verify", "union", "cantor-union", "telescope", "export-dot")

OK, NEGATIVE, ERROR = 0, 2, 1


def _plain(value):
    """JSON-safe copy: fractions as ``"p/q"`` strings, tuples as lists."""
    if isinstance(value, Fraction):
        return str(value)
    if value is INFINITY:
        return "inf"
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


# -- graphs -----------------------------------------------------------------

def build_graph(cfg: JobConfig, depth: Optional[int] = None) -> augtree.LeveledGraph:
    depth = cfg.depth if depth is None else depth
    if cfg.kind == "ifs":
        return augtree.build_from_ifs(cfg.source, depth, cfg.budgets.refine)
    if cfg.kind == "explicit":
        n, edges = cfg.source
        return augtree.build_explicit(n, depth, edges)
    if cfg.kind == "chain":
        return augtree.build_chain_rule(cfg.source, depth)
    if cfg.kind == "union":
        return augtree.build_union_from_ifs(cfg.source, depth, cfg.budgets.refine)
    if cfg.kind == "cantor_union":
        return cantor_union_plan(cfg.source, depth, cfg.budgets.refine)[1]
    raise InvalidArgument(f"unknown source kind {cfg.kind!r}")


def _offsets(alpha: Fraction, m: int):
    base = [sum(d * 3 ** (m - 1 - i) for i, d in enumerate(digits))
            for digits in _digit_words(m)]
    shift = alpha * 3 ** m
    return sorted(set(base) | {b + int(shift) for b in base})


def _digit_words(m):
    words = [()]
    for _ in range(m):
        words = [w + (d,) for w in words for d in (0, 2)]
    return words


def _runs(points):
    runs, cur = [], [points[0]]
    for p in points[1:]:
        if p == cur[-1] + 1:
            cur.append(p)
        else:
            runs.append(cur)
            cur = [p]
    runs.append(cur)
    return runs


def cantor_union_plan(alpha: Fraction, depth: int, refine: int = 12) -> Tuple[dict, augtree.LeveledGraph]:
    """Route ``C ∪ (C + alpha)`` to one of three treatments.

    ``alpha > 1`` is a disjoint union and ``alpha = 1`` a touching union;
    both go through the geometric builder.  When ``alpha < 1`` has two
    ternary expansions the set splits at a fine enough level into scaled
    translates of ``C`` and of ``C ∪ (C + 1)``.  Otherwise the digit rule
    graph is classified directly.
    """
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise InvalidArgument("alpha must be positive")
    if alpha >= 1:
        graph = augtree.build_union_from_ifs([middle_third(), cantor_translate(alpha)], depth, refine)
        return {"regime": "disjoint" if alpha > 1 else "touching", "alpha": alpha}, graph
    expansion = signed_ternary_expand(alpha)
    if not expansion.dual:
        graph = augtree.build_digit_rule(expansion, depth)
        return {"regime": "unique", "alpha": alpha, "preperiod": list(expansion.preperiod),
                "period": list(expansion.period),
                "stabilization_bound": len(expansion.preperiod) + 2 * len(expansion.period)}, graph
    m = 0
    while (alpha * 3 ** m).denominator != 1:
        m += 1
    for level in range(m, m + 8):
        runs = _runs(_offsets(alpha, level))
        if max(len(r) for r in runs) <= 2:
            break
    else:
        raise InvalidArgument(f"no split into pieces of at most two touching translates for alpha={alpha}")
    graph = augtree.build_union_from_ifs([middle_third(), cantor_translate(1)], depth, refine)
    plan = {"regime": "dual", "alpha": alpha, "level": level,
            "pieces": runs,
            "singletons": sum(1 for r in runs if len(r) == 1),
            "touching_pairs": sum(1 for r in runs if len(r) == 2),
            "scale": f"1/{3 ** level}"}
    return plan, graph


# -- commands ---------------------------------------------------------------

def _classify(cfg: JobConfig, graph):
    return classes.classify(graph, cfg.budgets.classes)


def _class_payload(report, n):
    out = report.to_json()
    out["alphabet_size"] = n
    out["eigen_identity"] = classes.eigen_identity(report.incidence, report.sizes, n) if report.simple else None
    return out


def cmd_build(cfg, args):
    g = build_graph(cfg)
    out = {"depth": g.depth, "alphabet_size": g.alphabet_size, "source": g.source,
           "level_sizes": [len(l) for l in g.levels],
           "horizontal_edges": [len(g.edges(n)) for n in range(g.depth + 1)],
           "max_component_size": g.max_component_size()}
    if cfg.kind == "ifs":
        out["condition_h_margin"] = condition_h_margin(cfg.source, min(cfg.depth, 6))
    _maybe_dot(g, args)
    return out, OK


def cmd_components(cfg, args):
    g = build_graph(cfg)
    levels = []
    for n in range(1, g.depth + 1):
        comps = g.components(n)
        levels.append({"level": n, "count": len(comps),
                       "sizes": sorted(len(c) for c in comps),
                       "nontrivial": [[word_str(w) for w in c] for c in comps if len(c) > 1][:64]})
    return {"levels": levels}, OK


def cmd_classify(cfg, args):
    g = build_graph(cfg)
    report = _classify(cfg, g)
    return _class_payload(report, g.alphabet_size), OK if report.simple else NEGATIVE


def cmd_incidence(cfg, args):
    g = build_graph(cfg)
    report = _classify(cfg, g)
    out = {"verdict": report.verdict, "sizes": report.sizes, "incidence": report.incidence,
           "alphabet_size": g.alphabet_size}
    if report.simple:
        out["eigen_identity"] = classes.eigen_identity(report.incidence, report.sizes, g.alphabet_size)
        out["quotient_level_sizes"] = [len(l) for l in augtree.quotient_tree(g).levels]
    return out, OK if report.simple else NEGATIVE


def _matrix(cfg):
    if "matrix" in cfg.extra:
        return cfg.extra["matrix"], cfg.extra.get("sizes"), cfg.extra.get("n")
    g = build_graph(cfg)
    report = _classify(cfg, g)
    if not report.simple:
        raise NotSimple("classification is inconclusive; no incidence matrix")
    return report.incidence, report.sizes, g.alphabet_size


def cmd_frobenius(cfg, args):
    a, _, _ = _matrix(cfg)
    form = matstruct.frobenius_form(a)
    ell, powered = matstruct.lemma41_exponent(a)
    return {"matrix": a, "permutation": form.permutation, "blocks": form.blocks,
            "block_kinds": form.block_kinds, "normal_form": form.matrix,
            "exponent": ell, "power_block_kinds": powered.block_kinds}, OK


def cmd_rearrange(cfg, args):
    k_budget = args.budget_k or cfg.budgets.k
    if "row" in cfg.extra:
        row, sizes, n = cfg.extra["row"], cfg.extra.get("sizes"), cfg.extra.get("n")
        if sizes is None or n is None:
            raise InvalidArgument("a row needs \"sizes\" and \"n\"")
        p = cfg.extra.get("p")
        if cfg.extra.get("quasi"):
            if p is None:
                raise InvalidArgument("the quasi variant needs \"p\"")
            c = rearrange.solve_quasi(row, sizes, n, p)
        else:
            c = rearrange.solve_rearrange(row, sizes, n, p)
        return {"row": row, "sizes": sizes, "n": n, "p": p, "quasi": bool(cfg.extra.get("quasi")),
                "feasible": c is not None, "matrix": c}, OK if c is not None else NEGATIVE
    a, u, n = _matrix(cfg)
    if u is None or n is None:
        raise InvalidArgument("a matrix needs \"sizes\" and \"n\"")
    form = matstruct.frobenius_form(a)
    blocks = []
    feasible = True
    for block, kind in zip(form.blocks, form.block_kinds):
        sub = matstruct.submatrix(a, block)
        us = [u[i] for i in block]
        entry = {"block": block, "kind": kind}
        if kind == matstruct.ZERO:
            entry["result"] = None
        elif kind != matstruct.PRIMITIVE:
            entry["result"] = None
            entry["note"] = "not primitive; telescope by the exponent first"
            feasible = False
        elif matstruct.matvec(sub, us) == [n * x for x in us]:
            res = rearrange.power_rearrange(sub, us, n, k_budget)
            entry["variant"] = "strict"
            entry["result"] = None if res is None else {"k": res.k, "target": res.target,
                                                         "matrices": res.matrices}
            feasible &= res is not None
        else:
            res = rearrange.quasi_power_rearrange(sub, us, n, k_budget, k_budget)
            entry["variant"] = "quasi"
            entry["result"] = None if res is None else {"n": res.n, "k": res.k, "w": res.w,
                                                         "bordered": res.bordered, "target": res.target,
                                                         "matrices": res.matrices}
            feasible &= res is not None
        blocks.append(entry)
    return {"matrix": a, "sizes": u, "n": n, "blocks": blocks, "feasible": feasible}, \
        OK if feasible else NEGATIVE


def cmd_near_isometry(cfg, args):
    depth = cfg.depth
    try:
        if "union" in cfg.extra:
            n, copies = cfg.extra["union"]
            sigma = neariso.sigma_union(n, copies, depth)
        elif "component" in cfg.extra:
            sigma = neariso.sigma_primitive(build_graph(cfg, depth + 2), cfg.extra["component"], depth)
        else:
            sigma = neariso.sigma_general(build_graph(cfg, depth + 2), depth)
    except (RearrangeFailed, QuasiRearrangeFailed, NotSimple) as exc:
        return {"feasible": False, "reason": exc.code, "message": str(exc)}, NEGATIVE
    dist = neariso.verify_distortion(sigma, pair_budget=cfg.budgets.pairs)
    out = sigma.certificate()
    out["feasible"] = True
    out["bijective"] = neariso.check_bijective(sigma)
    out["gromov_deviation"] = dist.gromov_deviation
    out["level_shift"] = dist.level_shift
    out["pairs"] = dist.pairs
    return out, OK


def cmd_verify(cfg, args):
    g = build_graph(cfg)
    if cfg.metric_a is not None:
        a = float(cfg.metric_a)
    elif cfg.kind in ("ifs", "union"):
        system = cfg.source if cfg.kind == "ifs" else cfg.source[0]
        a = math.log(1 / float(system.ratio))
    else:
        a = 1.0
    sandwich = augtree.gromov_sandwich_check(g)
    metric = augtree.metric_comparison_check(g, a)
    witness = augtree.hyperbolicity_witness(g)
    out = {
        "sandwich": {"holds": sandwich.holds, "reverse_holds": sandwich.reverse_holds, "k": sandwich.k,
                     "min_gap": sandwich.min_gap, "max_gap": sandwich.max_gap,
                     "lower_violations": sandwich.lower_violations,
                     "upper_violations": sandwich.upper_violations, "pairs": sandwich.pairs},
        "metric": {"a": a, "c": metric.c, "holds": metric.holds, "reverse_holds": metric.reverse_holds,
                   "min_ratio": metric.min_ratio, "max_ratio": metric.max_ratio},
        "hyperbolicity": {"max_horizontal_part": witness.max_horizontal_part,
                          "delta_estimate": witness.delta_estimate, "sampled": witness.sampled},
    }
    passed = sandwich.holds and metric.holds
    out["passed"] = passed
    return out, OK if passed else NEGATIVE


def cmd_union(cfg, args):
    if cfg.kind not in ("union", "cantor_union"):
        raise InvalidArgument("the union command needs a union or cantor_union source")
    g = build_graph(cfg)
    report = _classify(cfg, g)
    out = _class_payload(report, g.alphabet_size)
    out["copies"] = len(g.levels[1])
    return out, OK if report.simple else NEGATIVE


def cmd_cantor_union(cfg, args):
    if cfg.kind != "cantor_union":
        raise InvalidArgument("the cantor-union command needs a cantor_union source")
    plan, g = cantor_union_plan(cfg.source, cfg.depth, cfg.budgets.refine)
    report = _classify(cfg, g)
    out = dict(plan)
    out["classification"] = _class_payload(report, g.alphabet_size)
    if plan["regime"] == "unique" and report.simple:
        out["stabilized_within_bound"] = report.stabilization_depth <= plan["stabilization_bound"]
    return out, OK if report.simple else NEGATIVE


def cmd_telescope(cfg, args):
    k = cfg.extra.get("telescope") or args.budget_k or 2
    g = build_graph(cfg)
    usable = g.depth - g.depth % k
    if usable < g.depth:
        g = build_graph(cfg, usable)
    base = _classify(cfg, g)
    t = augtree.telescope(g, k)
    report = classes.classify(t)
    out = {"k": k, "telescoped": _class_payload(report, t.alphabet_size),
           "base": _class_payload(base, g.alphabet_size)}
    if base.simple and report.simple:
        out["matches_power"] = report.incidence == matstruct.matpow(base.incidence, k)
    _maybe_dot(t, args)
    return out, OK if report.simple else NEGATIVE


def cmd_export_dot(cfg, args):
    g = build_graph(cfg)
    text = augtree.export_dot(g)
    target = args.dot or cfg.outputs.get("dot")
    out = {"vertices": sum(len(l) for l in g.levels), "horizontal_edges": len(g.all_edges())}
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
        out["dot_path"] = target
    else:
        out["dot"] = text
    return out, OK


def _maybe_dot(graph, args):
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(augtree.export_dot(graph))


HANDLERS = {
    "build": cmd_build, "components": cmd_components, "classify": cmd_classify,
    "incidence": cmd_incidence, "frobenius": cmd_frobenius, "rearrange": cmd_rearrange,
    "near-isometry": cmd_near_isometry, "verify": cmd_verify, "union": cmd_union,
    "cantor-union": cmd_cantor_union, "telescope": cmd_telescope, "export-dot": cmd_export_dot,
}


def run(command: str, cfg: JobConfig, args=None) -> Tuple[dict, int]:
    """Dispatch one command; errors become a report with exit status 1."""
    args = args if args is not None else argparse.Namespace(budget_k=None, dot=None, out=None)
    if command not in HANDLERS:
        raise InvalidArgument(f"unknown command {command!r}")
    try:
        body, code = HANDLERS[command](cfg, args)
    except HyperlipError as exc:
        return _error(command, exc), ERROR
    status = "ok" if code == OK else "negative"
    return {"schema": "1", "command": command, "status": status, "result": body}, code


def _error(command, exc):
    err = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, ParseError) and exc.line is not None:
        err.update(line=exc.line, column=exc.column, path=exc.path)
    return {"schema": "1", "command": command, "status": "error", "error": err}


def _threads() -> int:
    raw = os.environ.get("HYPERLIP_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgument(f"HYPERLIP_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InvalidArgument("HYPERLIP_THREADS must be a positive integer")
    return value


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperlip", description="Augmented-tree certificates for self-similar sets.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON job file")
    p.add_argument("--depth", type=int, help="tree depth (overrides the config)")
    p.add_argument("--budget-k", type=int, dest="budget_k", help="power or telescoping budget")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--dot", help="also write the graph as DOT")
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        _threads()
        cfg = load_config(args.config)
        if args.depth is not None:
            if args.depth < 1:
                raise InvalidArgument("depth must be positive")
            cfg.depth = args.depth
        report, code = run(args.command, cfg, args)
    except HyperlipError as exc:
        report, code = _error(args.command, exc), ERROR
    except OSError as exc:
        report, code = {"schema": "1", "command": args.command, "status": "error",
                        "error": {"code": "io_error", "message": str(exc)}}, ERROR
    text = dumps(report)
    out = args.out or None
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
