"""Reduction constructions and the bond normalizations on edge-embedding towers."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb

from .graph import (Bond, Graph, GraphError, cut_set, require_connected, subdivide_all,
                    verify_bond)

XI_GUARD = 5000


def psi(g: Graph) -> Graph:
    """``n`` copies of ``g`` plus two adjacent vertices joined to every copy vertex.

    Copy ``c`` of vertex ``x`` is ``c*n + x``; the extra vertices are ``n*n`` and ``n*n + 1``.
    """
    if g.multigraph or g.weighted:
        raise GraphError("psi expects a simple unweighted graph")
    require_connected(g)
    n = g.num_vertices
    va, vb = n * n, n * n + 1
    edges = []
    for c in range(n):
        edges.extend((c * n + u, c * n + v, 1) for u, v, _ in g.edges)
    edges.append((va, vb, 1))
    for x in range(n * n):
        edges.append((x, va, 1))
        edges.append((x, vb, 1))
    return Graph(n * n + 2, tuple(edges))


def regular_degree(g: Graph) -> int | None:
    degs = {len(inc) for inc in g.incidence}
    return degs.pop() if len(degs) == 1 else None


@dataclass(frozen=True)
class W1Instance:
    graph: Graph
    expected_bond: int
    expected_side: int


def w1_instance(h: Graph, k: int) -> W1Instance:
    """Add an edge between every vertex pair of ``h``, then subdivide everything.

    Original vertices keep their ids; the parallel copy of edge ``i`` of ``h``
    is edge ``i`` of the multigraph and pair edges follow in lexicographic order.
    """
    if h.multigraph or h.weighted:
        raise GraphError("expected a simple unweighted graph")
    d = regular_degree(h)
    if d is None:
        raise GraphError("graph is not regular")
    n = h.num_vertices
    pairs = [(u, v, 1) for u in range(n) for v in range(u + 1, n)]
    multi = Graph(n, h.edges + tuple(pairs), multigraph=True)
    return W1Instance(subdivide_all(multi), d * k + k * (n - k), k + comb(k, 2))


# --- edge-embedding towers ---

@dataclass(frozen=True)
class SplitEdge:
    """A weight-1 edge ``u-v`` of some level.

    Below the top level it is replaced by a pattern copy: ``copy[i]`` is the
    vertex for pattern vertex ``i`` and ``children[e]`` the record for the
    copy of pattern edge ``e``.  At the top level ``edge`` is its index in the
    final graph.
    """
    level: int
    u: int
    v: int
    copy: tuple = ()
    children: tuple = ()
    descendants: frozenset = frozenset()
    edge: int | None = None


@dataclass(frozen=True)
class XiInstance:
    graph: Graph
    height: int
    pattern: Graph
    splits: tuple  # SplitEdge records, root first, grouped by level
    edge_levels: tuple  # per graph edge: level of the iteration that created it

    @property
    def inner_splits(self) -> list[SplitEdge]:
        return [r for r in self.splits if r.level < self.height]

    @property
    def copy_map(self) -> dict:
        return {(r.level, r.u, r.v): r.copy for r in self.inner_splits}

    def descendants_of(self, u: int, v: int) -> frozenset:
        for r in self.splits:
            if {r.u, r.v} == {u, v}:
                return r.descendants
        raise KeyError((u, v))


def xi_power(pattern: Graph, h: int) -> XiInstance:
    if h < 0:
        raise GraphError("height must be non-negative")
    if pattern.multigraph or pattern.weighted:
        raise GraphError("pattern must be simple and unweighted")
    require_connected(pattern)
    p = pattern.num_vertices
    if p ** (h + 1) > XI_GUARD:
        raise GraphError(f"tower too large: {p}^{h + 1} > {XI_GUARD}")
    raw = [dict(level=0, u=0, v=1, copy=(), children=())]
    anchors: list = []  # (u, v, level)
    frontier = [0]
    nxt = 2
    for j in range(1, h + 1):
        new_frontier = []
        for ri in frontier:
            rec = raw[ri]
            copy = tuple(range(nxt, nxt + p))
            nxt += p
            for t in copy:
                anchors.append((rec["u"], t, j))
                anchors.append((rec["v"], t, j))
            kids = []
            for a, b, _ in pattern.edges:
                raw.append(dict(level=j, u=copy[a], v=copy[b], copy=(), children=()))
                kids.append(len(raw) - 1)
            rec["copy"], rec["children"] = copy, tuple(kids)
            new_frontier.extend(kids)
        frontier = new_frontier
    edges = [(a, b, 0) for a, b, _ in anchors]
    levels = [lv for _, _, lv in anchors]
    for ri in frontier:
        raw[ri]["edge"] = len(edges)
        edges.append((raw[ri]["u"], raw[ri]["v"], 1))
        levels.append(h)
    desc = [frozenset()] * len(raw)
    for i in range(len(raw) - 1, -1, -1):
        acc = set(raw[i]["copy"])
        for c in raw[i]["children"]:
            acc |= desc[c]
        desc[i] = frozenset(acc)
    splits = tuple(SplitEdge(r["level"], r["u"], r["v"], r["copy"], r["children"], desc[i],
                             r.get("edge")) for i, r in enumerate(raw))
    return XiInstance(Graph(nxt, tuple(edges), weighted=True), h, pattern, splits, tuple(levels))


def _valid_bond(x: XiInstance, f) -> frozenset:
    side = f.side if isinstance(f, Bond) else frozenset(f)
    res = verify_bond(x.graph, side)
    if not isinstance(res, Bond):
        raise GraphError(f"not a bond: {res.value}")
    return side


def _nice_for(rec: SplitEdge, side: frozenset) -> bool:
    if (rec.u in side) != (rec.v in side):
        return True
    inside = rec.u in side
    return all((y in side) == inside for y in rec.descendants)


def is_nice(x: XiInstance, f) -> bool:
    side = _valid_bond(x, f)
    return all(_nice_for(r, side) for r in x.inner_splits)


def _orient(x: XiInstance, side) -> frozenset:
    side = frozenset(side)
    return side if 0 in side else frozenset(x.graph.vertices) - side


def make_nice_bond(x: XiInstance, f) -> Bond:
    """Reconnect around the lowest offending split edge until none is left."""
    side = _valid_bond(x, f)
    start_weight = Bond.of(x.graph, side).weight
    g = x.graph
    last_level = -1
    rounds = 0
    while True:
        bad = next((r for r in x.inner_splits if not _nice_for(r, side)), None)
        if bad is None:
            break
        rounds += 1
        assert bad.level > last_level and rounds <= x.height, "offending level did not rise"
        last_level = bad.level
        s = side if bad.u in side else frozenset(g.vertices) - side
        allowed = s - {bad.v}
        comp = {bad.u}
        queue = deque([bad.u])
        while queue:
            a = queue.popleft()
            for b in g.neighbors[a]:
                if b in allowed and b not in comp:
                    comp.add(b)
                    queue.append(b)
        side = frozenset(comp)
    side = _orient(x, side)
    out = verify_bond(g, side)
    assert isinstance(out, Bond) and out.weight == start_weight
    return out


def induced_pattern_side(x: XiInstance, rec: SplitEdge, side: frozenset) -> frozenset:
    return frozenset(i for i, t in enumerate(rec.copy) if t in side)


def induced_cut(x: XiInstance, rec: SplitEdge, side: frozenset) -> tuple:
    """Pattern edge indices cut by the bond inside the copy replacing ``rec``."""
    return cut_set(x.pattern, induced_pattern_side(x, rec, side))


def _separated(rec: SplitEdge, side: frozenset) -> bool:
    return (rec.u in side) != (rec.v in side)


def is_uniform(x: XiInstance, f, l: int) -> bool:
    side = _valid_bond(x, f)
    if not is_nice(x, side):
        return False
    return all(len(induced_cut(x, r, side)) == l
               for r in x.inner_splits if _separated(r, side))


def _pattern_side_of_cut(pattern: Graph, cut) -> frozenset:
    """Recover the bipartition (side of vertex 0 excluded) of a pattern cut-set."""
    cut = set(cut)
    if any(not 0 <= e < pattern.num_edges for e in cut):
        raise GraphError("cut refers to an unknown pattern edge")
    color = {0: 0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b, e in pattern.incidence[a]:
            want = color[a] ^ (e in cut)
            if b not in color:
                color[b] = want
                queue.append(b)
            elif color[b] != want:
                raise GraphError("edge set is not a cut-set of the pattern")
    return frozenset(v for v, c in color.items() if c)


def lift_cut(x: XiInstance, cut, h: int | None = None) -> Bond:
    """Bond of the tower whose every separated copy induces ``cut``.

    Pattern vertices on the far side of the cut follow the record's ``v``
    endpoint, the rest follow ``u``; unseparated records carry their whole
    gadget along with their endpoints.
    """
    if h is not None and h != x.height:
        raise GraphError(f"tower has height {x.height}, not {h}")
    far = _pattern_side_of_cut(x.pattern, cut)
    side = {0}
    stack = [0]
    while stack:
        rec = x.splits[stack.pop()]
        if not rec.copy:
            continue
        if _separated(rec, frozenset(side)):
            for i, t in enumerate(rec.copy):
                if (i in far) == (rec.v in side):
                    side.add(t)
            stack.extend(rec.children)
        elif rec.u in side:
            side |= rec.descendants
    bond = verify_bond(x.graph, side)
    assert isinstance(bond, Bond)
    return bond


def make_uniform_bond(x: XiInstance, f) -> tuple[Bond, int]:
    """Lift the largest induced pattern cut; returns the bond and its ``l``."""
    side = make_nice_bond(x, f).side
    best = None
    for r in x.inner_splits:
        if _separated(r, side):
            c = induced_cut(x, r, side)
            if best is None or len(c) > len(best):
                best = c
    if best is None:  # height 0: the lone edge
        best = ()
    l = len(best)
    out = lift_cut(x, best)
    assert out.weight == l ** x.height >= Bond.of(x.graph, _valid_bond(x, f)).weight
    return out, l


def extract_cut(x: XiInstance, f, l: int) -> tuple:
    side = _valid_bond(x, f)
    if not is_uniform(x, side, l):
        raise GraphError(f"bond is not {l}-uniform")
    if x.height == 0:
        return ()
    return induced_cut(x, x.splits[0], side)


# --- binary weights to plain graphs ---

@dataclass(frozen=True)
class UnweightedImage:
    """Simple graph plus, per subdivision vertex, the source edge it came from."""
    graph: Graph
    source_vertices: int
    multiplicity: int
    origin: tuple  # origin[i] = edge index in the weighted graph, for vertex source_vertices + i

    def pull_back(self, side) -> frozenset | None:
        """Side restricted to the original vertices, or None if it becomes trivial."""
        s = frozenset(v for v in side if v < self.source_vertices)
        if not s or len(s) == self.source_vertices:
            return None
        return s


def binary_to_unweighted(h: Graph) -> UnweightedImage:
    """Weight-1 edges become ``max(m, 1)`` parallel edges, then every edge is subdivided."""
    require_connected(h)
    m = sum(1 for _, _, w in h.edges if w == 0)
    mult = max(m, 1)
    edges, origin = [], []
    for i, (u, v, w) in enumerate(h.edges):
        for _ in range(mult if w == 1 else 1):
            edges.append((u, v, 1))
            origin.append(i)
    sub = subdivide_all(Graph(h.num_vertices, tuple(edges), multigraph=True))
    return UnweightedImage(sub, h.num_vertices, mult, tuple(origin))


# --- or-compositions ---

def or_compose_bond(gs: list[Graph], pivots: list[int] | None = None) -> Graph:
    """Glue the graphs at one vertex each.

    The shared vertex is 0; the remaining vertices follow graph by graph in
    increasing order of their original ids.
    """
    if not gs:
        raise GraphError("need at least one graph")
    pivots = list(pivots) if pivots is not None else [0] * len(gs)
    if len(pivots) != len(gs):
        raise GraphError("one pivot per graph")
    edges, nxt = [], 1
    for g, p in zip(gs, pivots):
        require_connected(g)
        if g.num_vertices < 2:
            raise GraphError("each graph needs at least two vertices")
        ids = {p: 0}
        for v in g.vertices:
            if v != p:
                ids[v] = nxt
                nxt += 1
        edges.extend((ids[u], ids[v], w) for u, v, w in g.edges)
    return Graph(nxt, tuple(edges), any(g.multigraph for g in gs), any(g.weighted for g in gs))


def or_compose_st(instances: list[tuple[Graph, int, int]]) -> tuple[Graph, int, int]:
    """Chain instances, identifying each ``t_i`` with the next ``s_{i+1}``."""
    if not instances:
        raise GraphError("need at least one instance")
    edges, nxt = [], 0
    s = t = None
    link = None
    for g, si, ti in instances:
        require_connected(g)
        if si == ti:
            raise GraphError("s and t must differ")
        ids = {}
        if link is not None:
            ids[si] = link
        for v in g.vertices:
            if v not in ids:
                ids[v] = nxt
                nxt += 1
        if s is None:
            s = ids[si]
        edges.extend((ids[u], ids[v], w) for u, v, w in g.edges)
        link = t = ids[ti]
    multi = any(g.multigraph for g, _, _ in instances)
    weighted = any(g.weighted for g, _, _ in instances)
    return Graph(nxt, tuple(edges), multi, weighted), s, t
