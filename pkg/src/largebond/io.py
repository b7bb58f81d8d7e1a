"""Edge-list files and result rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .graph import Bond, Graph, GraphError


class GraphFormatError(GraphError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


def _fields(line: str):
    """Whitespace-separated fields with their 1-based columns."""
    out, col = [], 0
    for tok in line.split():
        col = line.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def _int(tok: str, col: int, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"expected integer {what}, got {tok!r}", lineno, col) from None


def parse_graph_text(text: str) -> Graph:
    rows = [(i, _fields(line)) for i, line in enumerate(text.splitlines(), 1)
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise GraphFormatError("missing header", 1)
    lineno, head = rows[0]
    if len(head) < 2 or len(head) > 4:
        raise GraphFormatError("header must be 'n m [weighted|unweighted] [multi|simple]'", lineno)
    n = _int(*head[0], lineno, "vertex count")
    m = _int(*head[1], lineno, "edge count")
    weighted = multi = False
    for tok, col in head[2:]:
        if tok in ("weighted", "unweighted"):
            weighted = tok == "weighted"
        elif tok in ("multi", "simple"):
            multi = tok == "multi"
        else:
            raise GraphFormatError(f"unknown header flag {tok!r}", lineno, col)
    if n < 0 or m < 0:
        raise GraphFormatError("counts must be non-negative", lineno)
    body = rows[1:]
    if len(body) != m:
        at = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}", at)
    edges, seen = [], set()
    for lineno, toks in body:
        want = 3 if weighted else 2
        if len(toks) != want:
            if not weighted and len(toks) == 3:
                raise GraphFormatError("unexpected weight column in unweighted graph",
                                       lineno, toks[2][1])
            raise GraphFormatError(f"expected {want} fields, found {len(toks)}", lineno)
        u = _int(*toks[0], lineno, "endpoint")
        v = _int(*toks[1], lineno, "endpoint")
        w = _int(*toks[2], lineno, "weight") if weighted else 1
        for x, (_, col) in ((u, toks[0]), (v, toks[1])):
            if not 0 <= x < n:
                raise GraphFormatError(f"vertex {x} out of range 0..{n - 1}", lineno, col)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if w not in (0, 1):
            raise GraphFormatError(f"weight {w} not in {{0, 1}}", lineno, toks[2][1])
        key = (min(u, v), max(u, v))
        if not multi and key in seen:
            raise GraphFormatError(f"repeated edge {key} in a simple graph", lineno)
        seen.add(key)
        edges.append((u, v, w))
    return Graph(n, tuple(edges), multi, weighted)


def parse_graph_file(path) -> Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph_text(text)


def format_graph(g: Graph) -> str:
    head = (f"{g.num_vertices} {g.num_edges} {'weighted' if g.weighted else 'unweighted'} "
            f"{'multi' if g.multigraph else 'simple'}")
    if g.weighted:
        lines = [f"{u} {v} {w}" for u, v, w in g.edges]
    else:
        lines = [f"{u} {v}" for u, v, _ in g.edges]
    return "\n".join([head] + lines) + "\n"


def write_graph_file(path, g: Graph) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


@dataclass
class Report:
    problem: str
    graph: Graph
    bond: Bond | None
    yes: bool
    optimum: int | None = None
    k: int | None = None
    elapsed_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        side = sorted(self.bond.side) if self.bond else []
        crossing = self.bond.crossing_pairs(self.graph) if self.bond else []
        out = {
            "problem": self.problem,
            "n": self.graph.num_vertices,
            "m": self.graph.num_edges,
            "k": self.k,
            "answer": "YES" if self.yes else "NO",
            "optimum": self.optimum,
            "side": side,
            "crossing_edges": crossing,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.graph.weighted and self.bond is not None:
            out["weight"] = self.bond.weight
        out.update(self.extra)
        return out


def to_dot(g: Graph, bond: Bond | None, name: str = "G") -> str:
    side = bond.side if bond else frozenset()
    crossing = set(bond.crossing_edges) if bond else set()
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for v in g.vertices:
        style = ' [style=filled, fillcolor="#f4a261"]' if v in side else ""
        lines.append(f"  {v}{style};")
    for i, (u, v, w) in enumerate(g.edges):
        attrs = []
        if i in crossing:
            attrs.append("style=bold")
            attrs.append("penwidth=3")
        if g.weighted:
            attrs.append(f'label="{w}"')
        tail = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {u} -- {v}{tail};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_result(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.as_dict(), sort_keys=False) + "\n").encode()
    if fmt == "text":
        d = report.as_dict()
        return "".join(f"{k}: {v}\n" for k, v in d.items()).encode()
    if fmt == "dot":
        return to_dot(report.graph, report.bond).encode()
    raise GraphError(f"unknown format {fmt!r}")
