"""Core graph types, cuts, bonds and block structure.

Vertices are the integers ``0..n-1``.  Edges are identified by their index in
``Graph.edges`` so that parallel edges of a multigraph stay distinguishable.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import networkx as nx


class GraphError(ValueError):
    """Malformed graph or a violated precondition."""


class DisconnectedGraphError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: tuple[tuple[int, int, int], ...] = ()
    multigraph: bool = False
    weighted: bool = False

    def __post_init__(self):
        norm = []
        seen = set()
        for e in self.edges:
            if len(e) == 2:
                u, v, w = e[0], e[1], 1
            else:
                u, v, w = e
            u, v, w = int(u), int(v), int(w)
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise GraphError(f"edge ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if w not in (0, 1):
                raise GraphError(f"edge ({u}, {v}) has weight {w}; weights must be 0 or 1")
            key = (min(u, v), max(u, v))
            if not self.multigraph and key in seen:
                raise GraphError(f"repeated edge {key} in a simple graph")
            seen.add(key)
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))
        if not self.weighted and any(w == 0 for _, _, w in norm):
            object.__setattr__(self, "weighted", True)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable, multigraph: bool = False,
                   weighted: bool = False) -> "Graph":
        return cls(n, tuple(tuple(p) for p in pairs), multigraph, weighted)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the (neighbor, edge index) pairs in ascending edge order."""
        inc = [[] for _ in range(self.num_vertices)]
        for i, (u, v, _) in enumerate(self.edges):
            inc[u].append((v, i))
            inc[v].append((u, i))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def neighbors(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(x for x, _ in inc) for inc in self.incidence)

    @cached_property
    def adjacency_masks(self) -> tuple[int, ...]:
        masks = [0] * self.num_vertices
        for u, v, _ in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def weight_of(self, edge_ids: Iterable[int]) -> int:
        return sum(self.edges[i][2] for i in edge_ids)

    def induced_connected(self, vertices: Iterable[int]) -> bool:
        vs = set(vertices)
        if not vs:
            return False
        start = min(vs)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.neighbors[x]:
                if y in vs and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(vs)

    def is_connected(self) -> bool:
        return self.num_vertices > 0 and self.induced_connected(self.vertices)

    def relabel(self, perm) -> "Graph":
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph(self.num_vertices,
                     tuple((perm[u], perm[v], w) for u, v, w in self.edges),
                     self.multigraph, self.weighted)

    def subgraph(self, vertices: Iterable[int], edge_ids: Iterable[int] | None = None):
        """Induced (or edge-restricted) subgraph, relabeled to ``0..k-1``.

        Returns ``(graph, old_ids)`` where ``old_ids[new] == old``.
        """
        old = sorted(set(vertices))
        new_of = {v: i for i, v in enumerate(old)}
        if edge_ids is None:
            edge_ids = [i for i, (u, v, _) in enumerate(self.edges)
                        if u in new_of and v in new_of]
        edges = tuple((new_of[self.edges[i][0]], new_of[self.edges[i][1]], self.edges[i][2])
                      for i in sorted(edge_ids))
        return Graph(len(old), edges, self.multigraph, self.weighted), old

    def to_networkx(self) -> nx.Graph:
        """Simple networkx projection (parallel edges collapsed)."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((u, v) for u, v, _ in self.edges)
        return g


def require_connected(g: Graph) -> None:
    if not g.is_connected():
        raise DisconnectedGraphError("bonds are only defined on connected graphs")


@dataclass(frozen=True)
class Bond:
    side: frozenset
    crossing_edges: tuple[int, ...]
    size: int
    weight: int

    @classmethod
    def of(cls, g: Graph, side: Iterable[int]) -> "Bond":
        """Build the certificate for ``side`` without checking connectivity."""
        side = frozenset(side)
        crossing = cut_set(g, side)
        return cls(side, crossing, len(crossing), g.weight_of(crossing))

    def other_side(self, g: Graph) -> frozenset:
        return frozenset(g.vertices) - self.side

    def crossing_pairs(self, g: Graph) -> list[list[int]]:
        return [[g.edges[i][0], g.edges[i][1]] for i in self.crossing_edges]


class BondRejection(str, enum.Enum):
    EMPTY_SIDE = "EMPTY_SIDE"
    FULL_SIDE = "FULL_SIDE"
    LEFT_DISCONNECTED = "LEFT_DISCONNECTED"
    RIGHT_DISCONNECTED = "RIGHT_DISCONNECTED"


def connected_components(g: Graph) -> list[frozenset]:
    """Components ordered by their smallest vertex."""
    seen = [False] * g.num_vertices
    comps = []
    for start in g.vertices:
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.neighbors[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        comps.append(frozenset(comp))
    return comps


def cut_set(g: Graph, side: Iterable[int]) -> tuple[int, ...]:
    side = set(side)
    return tuple(i for i, (u, v, _) in enumerate(g.edges) if (u in side) != (v in side))


def verify_bond(g: Graph, side: Iterable[int]) -> Bond | BondRejection:
    """Return the bond certificate for ``side`` or the reason it is not one."""
    require_connected(g)
    side = frozenset(side)
    if not side:
        return BondRejection.EMPTY_SIDE
    if len(side) >= g.num_vertices:
        return BondRejection.FULL_SIDE
    if not g.induced_connected(side):
        return BondRejection.LEFT_DISCONNECTED
    if not g.induced_connected(set(g.vertices) - side):
        return BondRejection.RIGHT_DISCONNECTED
    return Bond.of(g, side)


def is_bond(g: Graph, side: Iterable[int]) -> bool:
    return isinstance(verify_bond(g, side), Bond)


def yutsis_bound(g: Graph) -> int:
    return g.num_edges - g.num_vertices + 2


@dataclass(frozen=True)
class BlockCutTree:
    blocks: tuple[frozenset, ...]
    cut_vertices: frozenset
    tree_edges: tuple[tuple[int, int], ...]
    block_edges: tuple[tuple[int, ...], ...] = field(default=())

    def blocks_of(self, v: int) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]

    def block_path(self, s: int, t: int) -> list[int]:
        """Block ids on the block-cut tree path between the nodes of ``s`` and ``t``.

        A cut vertex is its own tree node; any other vertex sits in its unique block.
        """
        tree = nx.Graph()
        for b, c in self.tree_edges:
            tree.add_edge(("b", b), ("c", c))
        for i in range(len(self.blocks)):
            tree.add_node(("b", i))

        def node(v):
            return ("c", v) if v in self.cut_vertices else ("b", self.blocks_of(v)[0])

        path = nx.shortest_path(tree, node(s), node(t))
        return [x for kind, x in path if kind == "b"]


def block_cut_tree(g: Graph) -> BlockCutTree:
    require_connected(g)
    simple = g.to_networkx()
    blocks = sorted((frozenset(b) for b in nx.biconnected_components(simple)),
                    key=lambda b: sorted(b))
    if g.num_vertices == 1:
        blocks = [frozenset([0])]
    cuts = frozenset(nx.articulation_points(simple))
    block_of_pair = {}
    for bi, b in enumerate(blocks):
        for u in b:
            for v in g.neighbors[u]:
                if v in b:
                    block_of_pair[(u, v)] = bi
    block_edges = [[] for _ in blocks]
    for i, (u, v, _) in enumerate(g.edges):
        block_edges[block_of_pair[(u, v)]].append(i)
    tree_edges = tuple((bi, c) for bi, b in enumerate(blocks) for c in sorted(b & cuts))
    return BlockCutTree(tuple(blocks), cuts, tree_edges, tuple(tuple(x) for x in block_edges))


def subdivide_all(g: Graph) -> Graph:
    """Replace every edge ``u-v`` by ``u-x-v`` with a fresh vertex ``x``.

    Edge ``i`` gets the new vertex ``n + i``.
    """
    if g.weighted:
        raise GraphError("subdivision is only defined for unweighted graphs")
    n = g.num_vertices
    edges = []
    for i, (u, v, _) in enumerate(g.edges):
        edges.append((u, n + i, 1))
        edges.append((n + i, v, 1))
    return Graph(n + g.num_edges, tuple(edges))


def is_biconnected(g: Graph) -> bool:
    return g.num_vertices >= 3 and nx.is_biconnected(g.to_networkx())


def internally_disjoint_paths(g: Graph, s: int, t: int, v: int) -> tuple[list[int], list[int]]:
    """An ``s-v`` path and a ``t-v`` path meeting only at ``v``.

    Takes two disjoint ``s-v`` paths from a flow computation and splices a
    ``t-v`` path (avoiding ``s``) onto whichever of them it first touches.
    """
    if len({s, t, v}) != 3:
        raise GraphError("s, t and v must be distinct")
    if not is_biconnected(g):
        raise GraphError("graph is not 2-vertex-connected")
    simple = g.to_networkx()
    paths = sorted(nx.node_disjoint_paths(simple, s, v), key=lambda p: (len(p), p))[:2]
    if len(paths) < 2:
        raise GraphError("graph is not 2-vertex-connected")
    p_s, p_alt = paths
    avoid_s = simple.subgraph(x for x in simple if x != s)
    p_t_raw = nx.shortest_path(avoid_s, t, v)
    on = set(p_s) | set(p_alt)
    x = next(y for y in p_t_raw if y in on)
    if x != v and x in p_s:
        p_s, p_alt = p_alt, p_s
    head = p_t_raw[:p_t_raw.index(x)]
    tail = p_alt[p_alt.index(x):] if x != v else [v]
    return list(p_s), head + tail
