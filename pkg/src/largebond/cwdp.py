"""Clique-width expressions and the largest-bond DP over them.

Expressions are s-expressions::

    (v <label> <id>)        create vertex <id> with <label>
    (u <e1> <e2>)           disjoint union
    (j <i> <j> <e>)         join every i-labeled vertex to every j-labeled one
    (r <i> <j> <e>)         relabel i to j

A DP entry is keyed by ``(counts, types1, types2)``: ``counts[i]`` is the
number of side-1 vertices with label ``i+1``; ``types1``/``types2`` record, per
component type (a label bitmask), how many components of that type the side
has, saturated at 2.  The stored value is the best crossing-edge count.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .graph import Graph, GraphError, require_connected, verify_bond, Bond


class ExpressionError(GraphError):
    pass


@dataclass(frozen=True)
class Create:
    label: int
    vertex: int


@dataclass(frozen=True)
class Union_:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "Expr"


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "Expr"


Expr = Union[Create, Union_, Join, Relabel]


def children(e: Expr) -> tuple:
    if isinstance(e, Create):
        return ()
    if isinstance(e, Union_):
        return (e.left, e.right)
    return (e.child,)


def postorder(e: Expr) -> list:
    out, stack = [], [(e, False)]
    while stack:
        x, done = stack.pop()
        if done:
            out.append(x)
            continue
        stack.append((x, True))
        for c in reversed(children(x)):
            stack.append((c, False))
    return out


def width(e: Expr) -> int:
    w = 0
    for x in postorder(e):
        if isinstance(x, Create):
            w = max(w, x.label)
        elif isinstance(x, (Join, Relabel)):
            w = max(w, x.i, x.j)
    return w


def leaves(e: Expr) -> list[Create]:
    return [x for x in postorder(e) if isinstance(x, Create)]


def check_expression(e: Expr, max_label: int | None = None) -> None:
    ids = [x.vertex for x in leaves(e)]
    if len(set(ids)) != len(ids):
        raise ExpressionError("duplicate vertex id")
    for x in postorder(e):
        labels = (x.label,) if isinstance(x, Create) else (
            (x.i, x.j) if isinstance(x, (Join, Relabel)) else ())
        for lab in labels:
            if lab < 1 or (max_label is not None and lab > max_label):
                raise ExpressionError(f"label {lab} out of range")
        if isinstance(x, (Join, Relabel)) and x.i == x.j:
            raise ExpressionError("join and relabel need two distinct labels")


# --- text format ---

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_w_expression(text: str, max_label: int | None = None) -> Expr:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for m in _TOKEN.finditer(line):
            tokens.append((m.group(), lineno, m.start() + 1))
    pos = 0

    def fail(msg, at=None):
        tok = tokens[at if at is not None else min(pos, len(tokens) - 1)] if tokens else ("", 1, 1)
        raise ExpressionError(f"line {tok[1]}, column {tok[2]}: {msg}")

    def need_int(name):
        nonlocal pos
        if pos >= len(tokens):
            fail(f"expected {name}")
        tok = tokens[pos][0]
        if not tok.isdigit():
            fail(f"expected integer {name}, got {tok!r}")
        pos += 1
        return int(tok)

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != tok:
            fail(f"expected {tok!r}")
        pos += 1

    # explicit stack so deep expressions do not hit the recursion limit
    def parse() -> Expr:
        nonlocal pos
        frames: list = []
        result = None
        while True:
            if result is None:
                expect("(")
                if pos >= len(tokens):
                    fail("unexpected end of input")
                op = tokens[pos][0]
                pos += 1
                if op == "v":
                    lab, vid = need_int("label"), need_int("vertex id")
                    expect(")")
                    result = Create(lab, vid)
                elif op == "u":
                    frames.append(["u", []])
                    continue
                elif op in ("j", "r"):
                    frames.append([op, [need_int("label"), need_int("label")]])
                    continue
                else:
                    fail(f"unknown operation {op!r}", pos - 1)
            if not frames:
                return result
            frame = frames[-1]
            frame[1].append(result)
            result = None
            if frame[0] == "u" and len(frame[1]) == 2:
                expect(")")
                frames.pop()
                result = Union_(*frame[1])
            elif frame[0] in ("j", "r") and len(frame[1]) == 3:
                expect(")")
                frames.pop()
                i, j, child = frame[1]
                result = (Join if frame[0] == "j" else Relabel)(i, j, child)

    if not tokens:
        raise ExpressionError("empty expression")
    e = parse()
    if pos != len(tokens):
        fail("trailing input")
    check_expression(e, max_label)
    return e


def format_w_expression(e: Expr) -> str:
    out = {}
    for x in postorder(e):
        if isinstance(x, Create):
            out[id(x)] = f"(v {x.label} {x.vertex})"
        elif isinstance(x, Union_):
            out[id(x)] = f"(u {out[id(x.left)]} {out[id(x.right)]})"
        else:
            tag = "j" if isinstance(x, Join) else "r"
            out[id(x)] = f"({tag} {x.i} {x.j} {out[id(x.child)]})"
    return out[id(e)]


# --- evaluation ---

@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    labels: dict  # vertex -> final label


def _evaluate(e: Expr):
    """Vertex labels and edge set (as sorted pairs) of every node, bottom-up."""
    info = {}
    for x in postorder(e):
        if isinstance(x, Create):
            info[id(x)] = ({x.vertex: x.label}, set())
        elif isinstance(x, Union_):
            l1, e1 = info[id(x.left)]
            l2, e2 = info[id(x.right)]
            info[id(x)] = ({**l1, **l2}, e1 | e2)
        elif isinstance(x, Relabel):
            lab, edges = info[id(x.child)]
            info[id(x)] = ({v: (x.j if a == x.i else a) for v, a in lab.items()}, edges)
        else:
            lab, edges = info[id(x.child)]
            a = [v for v, q in lab.items() if q == x.i]
            b = [v for v, q in lab.items() if q == x.j]
            new = {(min(p, q), max(p, q)) for p in a for q in b}
            info[id(x)] = (lab, edges | new)
    return info


def eval_w_expression(e: Expr) -> LabeledGraph:
    labels, edges = _evaluate(e)[id(e)]
    ids = sorted(labels)
    if ids != list(range(len(ids))):
        raise ExpressionError("vertex ids must be 0..n-1")
    return LabeledGraph(Graph(len(ids), tuple(sorted(edges))), dict(labels))


def make_irredundant(e: Expr) -> Expr:
    """Drop every join whose edges are all re-created by a join above it.

    Labels only ever merge going up, so if the classes joined at a lower
    ``j(i, j)`` are joined again higher up, every edge of the lower join is
    re-added there.  After dropping those, no join sees an existing i-j edge.
    """
    # covered[x] = set of label pairs (at x's level) joined somewhere above x
    labs = range(1, max(width(e), 1) + 1)
    covered = {id(e): frozenset()}
    for x in reversed(postorder(e)):
        cov = covered[id(x)]
        if isinstance(x, Union_):
            covered[id(x.left)] = cov
            covered[id(x.right)] = cov
        elif isinstance(x, Join):
            covered[id(x.child)] = cov | {frozenset((x.i, x.j))}
        elif isinstance(x, Relabel):
            def up(a):
                return x.j if a == x.i else a
            covered[id(x.child)] = frozenset(
                frozenset((a, b)) for a in labs for b in labs
                if a < b and up(a) != up(b) and frozenset((up(a), up(b))) in cov)
    built = {}
    for x in postorder(e):
        if isinstance(x, Create):
            built[id(x)] = x
        elif isinstance(x, Union_):
            built[id(x)] = Union_(built[id(x.left)], built[id(x.right)])
        elif isinstance(x, Relabel):
            built[id(x)] = Relabel(x.i, x.j, built[id(x.child)])
        elif frozenset((x.i, x.j)) in covered[id(x)]:
            built[id(x)] = built[id(x.child)]
        else:
            built[id(x)] = Join(x.i, x.j, built[id(x.child)])
    return built[id(e)]


def count_joins(e: Expr) -> int:
    return sum(isinstance(x, Join) for x in postorder(e))


# --- the DP ---

def _bit(label: int) -> int:
    return 1 << (label - 1)


def _saturate(counter: dict) -> tuple:
    return tuple(sorted((t, min(2, c)) for t, c in counter.items() if c))


def _relabel_types(types: tuple, i: int, j: int) -> tuple:
    bi, bj = _bit(i), _bit(j)
    acc: dict = {}
    for t, c in types:
        nt = (t & ~bi) | bj if t & bi else t
        acc[nt] = acc.get(nt, 0) + c
    return _saturate(acc)


def _union_types(a: tuple, b: tuple) -> tuple:
    acc = dict(a)
    for t, c in b:
        acc[t] = acc.get(t, 0) + c
    return _saturate(acc)


def _join_types(types: tuple, i: int, j: int) -> tuple:
    """All components touching label i or j merge into one (both labels present)."""
    mask = _bit(i) | _bit(j)
    merged = 0
    rest = []
    for t, c in types:
        if t & mask:
            merged |= t
        else:
            rest.append((t, c))
    return tuple(sorted(rest + [(merged, 1)]))


def _is_single_component(types: tuple) -> bool:
    return len(types) == 1 and types[0][1] == 1


def relabel_key(key: tuple, i: int, j: int) -> tuple:
    s, t1, t2 = key
    s = list(s)
    s[j - 1] += s[i - 1]
    s[i - 1] = 0
    return tuple(s), _relabel_types(t1, i, j), _relabel_types(t2, i, j)


def union_key(a: tuple, b: tuple) -> tuple:
    return (tuple(p + q for p, q in zip(a[0], b[0])),
            _union_types(a[1], b[1]), _union_types(a[2], b[2]))


def join_key(key: tuple, i: int, j: int, label_counts: tuple) -> tuple[tuple, int]:
    """Entry after joining labels i and j, and the number of new crossing edges."""
    s, t1, t2 = key
    si, sj = s[i - 1], s[j - 1]
    oi, oj = label_counts[i - 1] - si, label_counts[j - 1] - sj
    gain = si * oj + sj * oi
    n1 = _join_types(t1, i, j) if si and sj else t1
    n2 = _join_types(t2, i, j) if oi and oj else t2
    return (s, n1, n2), gain


def table_size_bound(n: int, w: int) -> int:
    return (n + 1) ** w * 3 ** (2 * (2 ** w - 1))


@dataclass
class CwResult:
    value: int
    side: frozenset
    max_entries: int


def run_cw_dp(e: Expr, forced: dict[int, int] | None = None) -> CwResult:
    """Bottom-up DP; ``e`` must be irredundant.  ``forced`` pins vertices to side 1 or 2."""
    forced = forced or {}
    w = width(e)
    tables: dict = {}
    label_counts: dict = {}
    max_entries = 0
    for x in postorder(e):
        tab: dict = {}
        if isinstance(x, Create):
            cnt = [0] * w
            cnt[x.label - 1] = 1
            label_counts[id(x)] = tuple(cnt)
            t = ((_bit(x.label), 1),)
            if forced.get(x.vertex, 1) == 1:
                tab[(tuple(cnt), t, ())] = (0, ("create", x.vertex, 1))
            if forced.get(x.vertex, 2) == 2:
                tab[(tuple([0] * w), (), t)] = (0, ("create", x.vertex, 2))
        elif isinstance(x, Relabel):
            label_counts[id(x)] = relabel_key((label_counts[id(x.child)], (), ()), x.i, x.j)[0]
            for key, (val, _) in tables[id(x.child)].items():
                _offer(tab, relabel_key(key, x.i, x.j), val, key)
        elif isinstance(x, Union_):
            la, lb = label_counts[id(x.left)], label_counts[id(x.right)]
            label_counts[id(x)] = tuple(p + q for p, q in zip(la, lb))
            right = list(tables[id(x.right)].items())
            for k1, (v1, _) in tables[id(x.left)].items():
                for k2, (v2, _) in right:
                    _offer(tab, union_key(k1, k2), v1 + v2, (k1, k2))
        else:
            lc = label_counts[id(x.child)]
            label_counts[id(x)] = lc
            for key, (val, _) in tables[id(x.child)].items():
                nk, gain = join_key(key, x.i, x.j, lc)
                _offer(tab, nk, val + gain, key)
        tables[id(x)] = tab
        max_entries = max(max_entries, len(tab))

    best_key, best_val = None, -1
    for key, (val, _) in tables[id(e)].items():
        if _is_single_component(key[1]) and _is_single_component(key[2]) and val > best_val:
            best_key, best_val = key, val
    if best_key is None:
        raise GraphError("no bond: evaluated graph is disconnected or too small")
    return CwResult(best_val, _reconstruct(e, tables, best_key), max_entries)


def _offer(tab: dict, key, value: int, back) -> None:
    cur = tab.get(key)
    if cur is None or value > cur[0]:
        tab[key] = (value, back)


def _reconstruct(e: Expr, tables: dict, key) -> frozenset:
    side = set()
    stack = [(e, key)]
    while stack:
        x, k = stack.pop()
        back = tables[id(x)][k][1]
        if isinstance(x, Create):
            if back[2] == 1:
                side.add(back[1])
        elif isinstance(x, Union_):
            stack.append((x.left, back[0]))
            stack.append((x.right, back[1]))
        else:
            stack.append((x.child, back))
    return frozenset(side)


def largest_bond_cw(e: Expr) -> tuple[int, frozenset]:
    check_expression(e)
    g = eval_w_expression(e).graph
    require_connected(g)
    if g.num_vertices < 2:
        raise GraphError("a bond needs at least two vertices")
    res = run_cw_dp(make_irredundant(e))
    _check_witness(g, res)
    return res.value, res.side


def _check_witness(g: Graph, res: CwResult) -> None:
    bond = verify_bond(g, res.side)
    if not isinstance(bond, Bond) or bond.size != res.value:
        raise AssertionError(f"witness reconstruction failed: {bond}")  # pragma: no cover


def st_expression(e: Expr, s: int, t: int) -> Expr:
    """Give ``s`` and ``t`` the private labels w+1 and w+2.

    Every join on the way up from ``s`` (or ``t``) that touches its current
    label is mirrored by a join on its private label.
    """
    w = width(e)
    ls, lt = w + 1, w + 2
    private = {s: ls, t: lt}
    built = {}
    # track[id] = current label of s / t in that subtree, if present
    track: dict = {}
    for x in postorder(e):
        if isinstance(x, Create):
            if x.vertex in private:
                built[id(x)] = Create(private[x.vertex], x.vertex)
                track[id(x)] = {x.vertex: x.label}
            else:
                built[id(x)] = x
                track[id(x)] = {}
        elif isinstance(x, Union_):
            built[id(x)] = Union_(built[id(x.left)], built[id(x.right)])
            track[id(x)] = {**track[id(x.left)], **track[id(x.right)]}
        elif isinstance(x, Relabel):
            built[id(x)] = Relabel(x.i, x.j, built[id(x.child)])
            track[id(x)] = {v: (x.j if a == x.i else a) for v, a in track[id(x.child)].items()}
        else:
            cur = track[id(x.child)]
            node = Join(x.i, x.j, built[id(x.child)])
            for v, a in cur.items():
                if a == x.i:
                    node = Join(private[v], x.j, node)
                elif a == x.j:
                    node = Join(private[v], x.i, node)
            if s in cur and t in cur and {cur[s], cur[t]} == {x.i, x.j}:
                node = Join(ls, lt, node)
            built[id(x)] = node
            track[id(x)] = cur
    return built[id(e)]


def largest_st_bond_cw(e: Expr, s: int, t: int) -> tuple[int, frozenset]:
    if s == t:
        raise GraphError("s and t must differ")
    check_expression(e)
    g = eval_w_expression(e).graph
    require_connected(g)
    ext = make_irredundant(st_expression(e, s, t))
    if eval_w_expression(ext).graph.edges != g.edges:
        raise AssertionError("private-label rewrite changed the graph")  # pragma: no cover
    res = run_cw_dp(ext, forced={s: 1, t: 2})
    _check_witness(g, res)
    return res.value, res.side


# --- constructions ---

def relabel_all(e: Expr, target: int) -> Expr:
    for lab in range(1, width(e) + 1):
        if lab != target:
            e = Relabel(lab, target, e)
    return e


def shift_ids(e: Expr, offset: int) -> Expr:
    built = {}
    for x in postorder(e):
        if isinstance(x, Create):
            built[id(x)] = Create(x.label, x.vertex + offset)
        elif isinstance(x, Union_):
            built[id(x)] = Union_(built[id(x.left)], built[id(x.right)])
        else:
            built[id(x)] = type(x)(x.i, x.j, built[id(x.child)])
    return built[id(e)]


def psi_expression(e: Expr, n: int) -> Expr:
    """Expression for the psi-graph: ``n`` relabeled copies joined to an edge.

    Copy ``c`` of vertex ``x`` gets id ``c*n + x``; the two universal vertices
    get ``n*n`` and ``n*n + 1``.
    """
    copies = None
    for c in range(n):
        part = shift_ids(e, c * n)
        copies = part if copies is None else Union_(copies, part)
    copies = relabel_all(copies, 1)
    pair = Relabel(1, 2, Join(1, 2, Union_(Create(1, n * n), Create(2, n * n + 1))))
    return Join(1, 2, Union_(copies, pair))


def builtin_expression(kind: str, *params: int) -> Expr:
    """Low-width expressions: clique/complete_bipartite (2 labels), path (3), cycle (4)."""
    if any(p < 1 for p in params):
        raise ExpressionError("sizes must be positive")
    if kind == "clique":
        (n,) = params
        e: Expr = Create(1, 0)
        for v in range(1, n):
            e = Relabel(2, 1, Join(1, 2, Union_(e, Create(2, v))))
        return e
    if kind == "complete_bipartite":
        a, b = params
        e = Create(1, 0)
        for v in range(1, a):
            e = Union_(e, Create(1, v))
        for v in range(a, a + b):
            e = Union_(e, Create(2, v))
        return Join(1, 2, e)
    if kind == "path":
        (n,) = params
        e = Create(2, 0)
        for v in range(1, n):
            e = Relabel(3, 2, Relabel(2, 1, Join(2, 3, Union_(e, Create(3, v)))))
        return e
    if kind == "cycle":
        (n,) = params
        if n < 3:
            raise ExpressionError("a cycle needs at least 3 vertices")
        e = Join(4, 2, Union_(Create(4, 0), Create(2, 1)))
        for v in range(2, n):
            e = Relabel(3, 2, Relabel(2, 1, Join(2, 3, Union_(e, Create(3, v)))))
        return Join(2, 4, e)
    raise ExpressionError(f"unknown builtin {kind!r}")
