"""Command-line front end.

Exit status: 0 for YES or success, 1 for NO (or a rejected certificate /
invalid decomposition), 2 for errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

import networkx as nx

from . import cwdp, generators, oracle
from .decomposition import (heuristic_tree_decomposition, make_nice, parse_td, format_td,
                            validate_nice, validate_tree_decomposition)
from .graph import Bond, Graph, GraphError, block_cut_tree, verify_bond, yutsis_bound
from .io import Report, emit_result, parse_graph_file, write_graph_file
from .twdp import solve_largest_bond, solve_largest_st_bond

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _answer_report(problem: str, g: Graph, ans, elapsed: float, exact=None) -> Report:
    """``exact`` re-solves without a threshold when a minor certified the answer."""
    extra = {"certified_by": ans.via}
    bond, optimum = ans.bond, ans.optimum
    if optimum is None and exact is not None:
        extra["minor_witness_size"] = bond.size
        full = exact()
        bond, optimum = full.bond, full.optimum
    return Report(problem, g, bond, ans.yes, optimum, ans.k, elapsed, extra)


def _oracle_check(report: Report, s: int | None = None, t: int | None = None) -> None:
    g = report.graph
    if g.num_vertices > oracle.MAX_VERTICES:
        report.extra["oracle_check"] = "skipped"
        return
    ref = oracle.largest_bond_bf(g) if s is None else oracle.largest_st_bond_bf(g, s, t)
    report.extra["oracle_optimum"] = ref.size
    ok = (report.optimum == ref.size) if report.optimum is not None else report.bond.size <= ref.size
    report.extra["oracle_check"] = "agree" if ok else "DISAGREE"
    if not ok:
        raise GraphError(f"solver disagrees with oracle ({report.optimum} vs {ref.size})")


def _finish(args, report: Report) -> int:
    sys.stdout.buffer.write(emit_result(report, args.format))
    if getattr(args, "plot", None):
        from .plotting import plot_bond
        plot_bond(report.graph, report.bond, args.plot, title=report.problem)
    return EXIT_YES if report.yes else EXIT_NO


def cmd_solve(args) -> int:
    g = parse_graph_file(args.graph)
    t0 = time.perf_counter()
    ans = solve_largest_bond(g, args.k)
    exact = None if args.decision_only else (lambda: solve_largest_bond(g))
    report = _answer_report("largest-bond", g, ans, (time.perf_counter() - t0) * 1000, exact)
    if args.oracle_check:
        _oracle_check(report)
    return _finish(args, report)


def cmd_solve_st(args) -> int:
    g = parse_graph_file(args.graph)
    t0 = time.perf_counter()
    ans = solve_largest_st_bond(g, args.s, args.t, args.k)
    exact = None if args.decision_only else (lambda: solve_largest_st_bond(g, args.s, args.t))
    report = _answer_report("largest-st-bond", g, ans, (time.perf_counter() - t0) * 1000, exact)
    report.extra.update(s=args.s, t=args.t)
    if args.oracle_check:
        _oracle_check(report, args.s, args.t)
    return _finish(args, report)


def cmd_solve_cw(args) -> int:
    expr = cwdp.parse_w_expression(Path(args.expr).read_text(encoding="utf-8"))
    g = cwdp.eval_w_expression(expr).graph
    t0 = time.perf_counter()
    if args.st:
        s, t = args.st
        value, side = cwdp.largest_st_bond_cw(expr, s, t)
        problem = "largest-st-bond"
    else:
        s = t = None
        value, side = cwdp.largest_bond_cw(expr)
        problem = "largest-bond"
    elapsed = (time.perf_counter() - t0) * 1000
    yes = args.k is None or value >= args.k
    report = Report(problem, g, Bond.of(g, side), yes, value, args.k, elapsed,
                    {"certified_by": "cw-dp", "width": cwdp.width(expr)})
    if args.oracle_check:
        _oracle_check(report, s, t)
    return _finish(args, report)


def cmd_oracle(args) -> int:
    g = parse_graph_file(args.graph)
    t0 = time.perf_counter()
    if args.s is not None or args.t is not None:
        if args.s is None or args.t is None:
            raise GraphError("--s and --t go together")
        bond = oracle.largest_st_bond_bf(g, args.s, args.t)
        problem = "largest-st-bond"
    elif g.weighted:
        bond = oracle.largest_weight_bond_bf(g)
        problem = "largest-weight-bond"
    else:
        bond = oracle.largest_bond_bf(g)
        problem = "largest-bond"
    elapsed = (time.perf_counter() - t0) * 1000
    if bond is None:
        report = Report(problem, g, None, False, None, args.k, elapsed, {"certified_by": "oracle"})
    else:
        value = bond.weight if problem == "largest-weight-bond" else bond.size
        yes = args.k is None or value >= args.k
        report = Report(problem, g, bond, yes, value, args.k, elapsed,
                        {"certified_by": "oracle", "yutsis_bound": yutsis_bound(g)})
    return _finish(args, report)


def _sidecar(out: str, meta: dict) -> None:
    Path(out + ".json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def _max_cut_if_small(g: Graph):
    return oracle.max_cut_bf(g)[0] if g.num_vertices <= oracle.MAX_VERTICES else None


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "psi":
        src = parse_graph_file(args.graph)
        out = generators.psi(src)
        n = src.num_vertices
        mc = _max_cut_if_small(src)
        meta = {"construction": "psi", "source_n": n, "source_max_cut": mc,
                "predicted_largest_bond": None if mc is None else n * mc + n * n + 1,
                "universal_vertices": [n * n, n * n + 1]}
    elif kind == "xi":
        pat = parse_graph_file(args.graph)
        x = generators.xi_power(pat, args.h)
        out = x.graph
        mc = _max_cut_if_small(pat)
        meta = {"construction": "xi", "height": args.h, "pattern_n": pat.num_vertices,
                "pattern_max_cut": mc,
                "predicted_max_weight": None if mc is None else mc ** args.h,
                "edge_levels": list(x.edge_levels),
                "splits": [{"level": r.level, "u": r.u, "v": r.v, "copy": list(r.copy),
                            "descendants": sorted(r.descendants)} for r in x.splits]}
    elif kind == "w1":
        src = parse_graph_file(args.graph)
        inst = generators.w1_instance(src, args.k)
        out = inst.graph
        meta = {"construction": "w1", "k": args.k, "expected_bond": inst.expected_bond,
                "expected_side": inst.expected_side}
    elif kind == "compose":
        gs = [parse_graph_file(p) for p in args.graphs]
        if args.st_pairs:
            if len(args.st_pairs) != len(gs):
                raise GraphError("one s,t pair per graph")
            pairs = [tuple(int(x) for x in p.split(",")) for p in args.st_pairs]
            out, s, t = generators.or_compose_st([(g, a, b) for g, (a, b) in zip(gs, pairs)])
            meta = {"construction": "or-compose-st", "s": s, "t": t, "parts": len(gs)}
        else:
            out = generators.or_compose_bond(gs, args.pivots)
            meta = {"construction": "or-compose", "pivot": 0, "parts": len(gs)}
    elif kind == "random":
        out = random_connected_graph(args.n, args.p, random.Random(args.seed))
        meta = {"construction": "random", "n": args.n, "p": args.p, "seed": args.seed}
    else:  # pragma: no cover - argparse restricts choices
        raise GraphError(f"unknown generator {kind}")
    write_graph_file(args.out, out)
    meta.update(n=out.num_vertices, m=out.num_edges)
    _sidecar(args.out, meta)
    print(json.dumps({"written": args.out, "sidecar": args.out + ".json",
                      "n": out.num_vertices, "m": out.num_edges}))
    return EXIT_YES


def random_connected_graph(n: int, p: float, rng: random.Random) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    if n < 1:
        raise GraphError("need at least one vertex")
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n, tuple(sorted(edges)))


def cmd_check_bond(args) -> int:
    g = parse_graph_file(args.graph)
    side = [int(x) for x in args.side.split(",") if x.strip()]
    res = verify_bond(g, side)
    if isinstance(res, Bond):
        out = {"is_bond": True, "size": res.size, "weight": res.weight,
               "crossing_edges": res.crossing_pairs(g)}
    else:
        out = {"is_bond": False, "reason": res.value}
    print(json.dumps(out))
    return EXIT_YES if isinstance(res, Bond) else EXIT_NO


def cmd_blocks(args) -> int:
    g = parse_graph_file(args.graph)
    bct = block_cut_tree(g)
    out = {"blocks": [sorted(b) for b in bct.blocks],
           "cut_vertices": sorted(bct.cut_vertices),
           "tree_edges": [list(e) for e in bct.tree_edges]}
    if args.s is not None and args.t is not None:
        out["block_path"] = bct.block_path(args.s, args.t)
    print(json.dumps(out))
    return EXIT_YES


def cmd_td(args) -> int:
    g = parse_graph_file(args.graph)
    if args.action == "validate":
        td = parse_td(Path(args.td).read_text(encoding="utf-8"))
        v = validate_tree_decomposition(g, td)
        out = {"valid": v is None, "width": td.width}
        if v is not None:
            out["violation"] = v.kind
            out["witness"] = _jsonable(v.witness)
        print(json.dumps(out))
        return EXIT_YES if v is None else EXIT_NO
    td = parse_td(Path(args.td).read_text(encoding="utf-8")) if args.td \
        else heuristic_tree_decomposition(g)
    v = validate_tree_decomposition(g, td)
    if v is not None:
        raise GraphError(f"invalid decomposition: {v.kind}")
    ntd = make_nice(td, g)
    validate_nice(ntd, g)
    counts: dict = {}
    for node in ntd.nodes:
        counts[node.kind] = counts.get(node.kind, 0) + 1
    if args.write_td:
        Path(args.write_td).write_text(format_td(td, g.num_vertices), encoding="utf-8")
    print(json.dumps({"width": ntd.width, "nodes": len(ntd.nodes), "kinds": counts}))
    return EXIT_YES


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(y) for y in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; solvers run single-threaded")
    report = argparse.ArgumentParser(add_help=False)
    report.add_argument("--k", type=int, default=None, help="decision threshold")
    report.add_argument("--format", choices=("json", "text", "dot"), default="json")
    report.add_argument("--oracle-check", action="store_true",
                        help="cross-check against the exhaustive solver when small enough")
    report.add_argument("--plot", metavar="FILE", help="also draw the bond to an image file")
    report.add_argument("--decision-only", action="store_true",
                        help="skip computing the optimum when a minor already answers YES")

    p = argparse.ArgumentParser(prog="largebond", description="Exact largest bond solvers.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("solve", parents=[common, report], help="largest bond")
    q.add_argument("graph")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("solve-st", parents=[common, report], help="largest st-bond")
    q.add_argument("graph")
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.set_defaults(func=cmd_solve_st)

    q = sub.add_parser("solve-cw", parents=[common, report],
                       help="largest bond from a clique-width expression")
    q.add_argument("--expr", required=True)
    q.add_argument("--st", type=int, nargs=2, metavar=("S", "T"))
    q.set_defaults(func=cmd_solve_cw)

    q = sub.add_parser("oracle", parents=[common, report], help="exhaustive reference solver")
    q.add_argument("graph")
    q.add_argument("--s", type=int)
    q.add_argument("--t", type=int)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("gen", parents=[common], help="reduction instances")
    gsub = q.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("psi")
    g.add_argument("graph")
    g.add_argument("-o", "--out", required=True)
    g = gsub.add_parser("xi")
    g.add_argument("graph", help="pattern graph")
    g.add_argument("--h", type=int, required=True)
    g.add_argument("-o", "--out", required=True)
    g = gsub.add_parser("w1")
    g.add_argument("graph")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("-o", "--out", required=True)
    g = gsub.add_parser("compose")
    g.add_argument("graphs", nargs="+")
    g.add_argument("--pivots", type=int, nargs="+")
    g.add_argument("--st-pairs", nargs="+", metavar="S,T")
    g.add_argument("-o", "--out", required=True)
    g = gsub.add_parser("random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=0.2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", required=True)
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("check-bond", parents=[common], help="verify a bond certificate")
    q.add_argument("graph")
    q.add_argument("--side", required=True, help="comma-separated vertex ids")
    q.set_defaults(func=cmd_check_bond)

    q = sub.add_parser("blocks", parents=[common], help="block-cut tree")
    q.add_argument("graph")
    q.add_argument("--s", type=int)
    q.add_argument("--t", type=int)
    q.set_defaults(func=cmd_blocks)

    q = sub.add_parser("td", parents=[common], help="tree decompositions")
    q.add_argument("action", choices=("validate", "nice"))
    q.add_argument("graph")
    q.add_argument("td", nargs="?")
    q.add_argument("--write-td", metavar="FILE")
    q.set_defaults(func=cmd_td)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "td" and args.action == "validate" and not args.td:
        parser.error("td validate needs a decomposition file")
    try:
        return args.func(args)
    except (GraphError, OSError, nx.NetworkXException) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
