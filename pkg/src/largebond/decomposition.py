"""Tree decompositions, nice form, K_{2,k} minor models and win/win preprocessing."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .graph import (Bond, Graph, GraphError, block_cut_tree, connected_components,
                    internally_disjoint_paths, is_biconnected, require_connected,
                    verify_bond)


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class Violation:
    kind: str  # "vertex-coverage" | "edge-coverage" | "connectivity" | "not-a-tree"
    witness: tuple

    def __str__(self):
        return f"{self.kind} violation: {self.witness}"


def heuristic_tree_decomposition(g: Graph) -> TreeDecomposition:
    """Min-fill elimination ordering; valid but with no optimality guarantee."""
    require_connected(g)
    if g.num_vertices == 1:
        return TreeDecomposition((frozenset([0]),))
    _, tree = treewidth_min_fill_in(g.to_networkx())
    nodes = sorted(tree.nodes, key=lambda b: (sorted(b), len(b)))
    index = {b: i for i, b in enumerate(nodes)}
    edges = tuple(sorted(tuple(sorted((index[a], index[b]))) for a, b in tree.edges))
    return TreeDecomposition(tuple(frozenset(b) for b in nodes), edges)


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> Violation | None:
    """``None`` when ``td`` is a tree decomposition of ``g``, else the first violation."""
    k = len(td.bags)
    if k == 0:
        if g.num_vertices:
            return Violation("vertex-coverage", (0,))
        return None
    tree = nx.Graph()
    tree.add_nodes_from(range(k))
    for a, b in td.tree_edges:
        if not (0 <= a < k and 0 <= b < k):
            return Violation("not-a-tree", (a, b))
        tree.add_edge(a, b)
    if len(td.tree_edges) != k - 1 or not nx.is_connected(tree):
        return Violation("not-a-tree", tuple(td.tree_edges))
    for v in g.vertices:
        if not any(v in b for b in td.bags):
            return Violation("vertex-coverage", (v,))
    for u, v, _ in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return Violation("edge-coverage", (u, v))
    for v in g.vertices:
        holding = [i for i, b in enumerate(td.bags) if v in b]
        if not nx.is_connected(tree.subgraph(holding)):
            return Violation("connectivity", (v, tuple(holding)))
    return None


# --- PACE .td interchange (1-indexed bags and vertices) ---

def format_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    for a, b in td.tree_edges:
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    bags: dict[int, frozenset] = {}
    edges = []
    expected = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if parts[1] != "td" or len(parts) != 5:
                    raise GraphError(f"line {lineno}: malformed solution line")
                expected = int(parts[2])
            elif parts[0] == "b":
                bags[int(parts[1]) - 1] = frozenset(int(x) - 1 for x in parts[2:])
            else:
                a, b = (int(x) - 1 for x in parts)
                edges.append((a, b))
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    if expected is None:
        raise GraphError("missing 's td' line")
    if sorted(bags) != list(range(expected)):
        raise GraphError(f"expected bags 1..{expected}")
    return TreeDecomposition(tuple(bags[i] for i in range(expected)), tuple(edges))


# --- nice tree decompositions ---

LEAF = "leaf"
INTRODUCE = "introduce"
INTRODUCE_EDGE = "introduce_edge"
FORGET = "forget"
JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset
    children: tuple[int, ...] = ()
    vertex: int | None = None
    edge: int | None = None  # edge index for INTRODUCE_EDGE

    def __str__(self):
        tag = {LEAF: "Leaf", INTRODUCE: f"Intro({self.vertex})",
               FORGET: f"Forget({self.vertex})", JOIN: "Join",
               INTRODUCE_EDGE: f"IntroEdge(#{self.edge})"}[self.kind]
        return f"{tag} {sorted(self.bag)}"


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Nodes are stored children-first; the last node is the root."""
    nodes: tuple[NiceNode, ...]

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def width(self) -> int:
        return max(len(x.bag) for x in self.nodes) - 1

    def underlying(self) -> TreeDecomposition:
        edges = tuple((c, i) for i, x in enumerate(self.nodes) for c in x.children)
        return TreeDecomposition(tuple(x.bag for x in self.nodes), edges)

    def parents(self) -> list[int | None]:
        par: list[int | None] = [None] * len(self.nodes)
        for i, x in enumerate(self.nodes):
            for c in x.children:
                par[c] = i
        return par


def make_nice(td: TreeDecomposition, g: Graph, root: int = 0) -> NiceTreeDecomposition:
    """Convert a tree decomposition to a nice one with an empty root bag.

    Every edge of ``g`` gets one IntroduceEdge node, placed just below the
    Forget node of whichever endpoint leaves the bags first.
    """
    bad = validate_tree_decomposition(g, td)
    if bad is not None:
        raise GraphError(f"invalid tree decomposition: {bad}")
    nodes: list[NiceNode] = []

    def add(node: NiceNode) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def transition(top: int, target: frozenset) -> int:
        bag = nodes[top].bag
        for v in sorted(bag - target, reverse=True):
            bag = bag - {v}
            top = add(NiceNode(FORGET, bag, (top,), vertex=v))
        for v in sorted(target - bag):
            bag = bag | {v}
            top = add(NiceNode(INTRODUCE, bag, (top,), vertex=v))
        return top

    adj = td.adjacency()
    # iterative post-order over the decomposition tree
    order, parent = [], {root: None}
    stack = [root]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    top_of: dict[int, int] = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = sorted(y for y in adj[x] if parent.get(y) == x)
        tops = [transition(top_of[y], bag) for y in kids]
        if not tops:
            tops = [transition(add(NiceNode(LEAF, frozenset())), bag)]
        top = tops[0]
        for other in tops[1:]:
            top = add(NiceNode(JOIN, bag, (top, other)))
        top_of[x] = top
    transition(top_of[root], frozenset())
    return _place_edges(nodes, g)


def _place_edges(nodes: list[NiceNode], g: Graph) -> NiceTreeDecomposition:
    """Rebuild the node list inserting IntroduceEdge nodes below Forget nodes."""
    out: list[NiceNode] = []
    new_id: dict[int, int] = {}
    done = [False] * g.num_edges
    for i, x in enumerate(nodes):
        kids = tuple(new_id[c] for c in x.children)
        if x.kind == FORGET:
            child = kids[0]
            below = out[child].bag
            for w, e in g.incidence[x.vertex]:
                if not done[e] and w in below:
                    done[e] = True
                    out.append(NiceNode(INTRODUCE_EDGE, below, (child,), edge=e))
                    child = len(out) - 1
            kids = (child,)
        out.append(NiceNode(x.kind, x.bag, kids, x.vertex, x.edge))
        new_id[i] = len(out) - 1
    if not all(done):
        raise GraphError("some edge has no bag containing both endpoints")
    return NiceTreeDecomposition(tuple(out))


def validate_nice(ntd: NiceTreeDecomposition, g: Graph) -> None:
    """Raise ``GraphError`` unless ``ntd`` is a nice decomposition of ``g``."""
    if ntd.nodes[ntd.root].bag:
        raise GraphError("root bag must be empty")
    seen_edges = [0] * g.num_edges
    for x in ntd.nodes:
        kb = [ntd.nodes[c].bag for c in x.children]
        ok = {
            LEAF: not x.children and not x.bag,
            INTRODUCE: len(kb) == 1 and x.vertex not in kb[0] and x.bag == kb[0] | {x.vertex},
            FORGET: len(kb) == 1 and x.vertex in kb[0] and x.bag == kb[0] - {x.vertex},
            JOIN: len(kb) == 2 and kb[0] == x.bag == kb[1],
            INTRODUCE_EDGE: len(kb) == 1 and kb[0] == x.bag,
        }[x.kind]
        if not ok:
            raise GraphError(f"malformed node {x}")
        if x.kind == INTRODUCE_EDGE:
            u, v, _ = g.edges[x.edge]
            if u not in x.bag or v not in x.bag:
                raise GraphError(f"edge {x.edge} introduced outside its endpoints' bag")
            seen_edges[x.edge] += 1
    if any(c != 1 for c in seen_edges):
        raise GraphError("every edge must be introduced exactly once")
    bad = validate_tree_decomposition(g, ntd.underlying())
    if bad is not None:
        raise GraphError(str(bad))


# --- K_{2,k} minor models ---

@dataclass(frozen=True)
class MinorModel:
    side_a: frozenset
    side_b: frozenset
    legs: tuple[frozenset, ...]

    def branch_sets(self) -> list[frozenset]:
        return [self.side_a, self.side_b, *self.legs]


def check_minor_model(g: Graph, m: MinorModel) -> None:
    sets = m.branch_sets()
    seen: set = set()
    for b in sets:
        if not b:
            raise GraphError("empty branch set")
        if seen & b:
            raise GraphError("branch sets overlap")
        seen |= b
        if not g.induced_connected(b):
            raise GraphError(f"branch set {sorted(b)} is not connected")
    for leg in m.legs:
        for pole in (m.side_a, m.side_b):
            if not any(pole & g.neighbors[x] for x in leg):
                raise GraphError(f"leg {sorted(leg)} misses a pole")


def _legs(g: Graph, a: frozenset, b: frozenset) -> list[frozenset]:
    """Components of G - (A u B) adjacent to both A and B."""
    seen = set(a) | set(b)
    out = []
    for start in g.vertices:
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        touch_a = touch_b = False
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.neighbors[x]:
                if y in a:
                    touch_a = True
                elif y in b:
                    touch_b = True
                elif y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        if touch_a and touch_b:
            out.append(frozenset(comp))
    return out


def _grow(g: Graph, own: frozenset, other: frozenset, legs: list) -> tuple[frozenset, list]:
    """One greedy round: absorb neighbors of ``own`` that raise the leg count."""
    best = legs
    for x in sorted(set().union(*(g.neighbors[y] for y in own)) - own - other):
        cand = own | {x}
        trial = _legs(g, cand, other)
        if len(trial) > len(best):
            own, best = cand, trial
    return own, best


def find_k2k_minor(g: Graph, k: int) -> MinorModel | None:
    """Search for a K_{2,k} minor model.  Sound but incomplete: ``None`` proves nothing."""
    require_connected(g)
    n = g.num_vertices
    if k < 1 or n < k + 2:
        return None
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for a, b in pairs[: n * n]:
        if len(g.neighbors[a]) < 1 or len(g.neighbors[b]) < 1:
            continue
        A, B = frozenset([a]), frozenset([b])
        legs = _legs(g, A, B)
        if len(legs) < k:
            A, legs = _grow(g, A, B, legs)
            B, legs = _grow(g, B, A, legs)
        if len(legs) >= k:
            model = MinorModel(A, B, tuple(sorted(legs, key=min)))
            check_minor_model(g, model)
            return model
    return None


def absorb_uncovered(g: Graph, m: MinorModel) -> MinorModel:
    """Grow branch sets over uncovered vertices by BFS from the covered set."""
    sets = [set(b) for b in m.branch_sets()]
    owner = {v: i for i, b in enumerate(sets) for v in b}
    queue = deque(sorted(owner))
    while queue:
        x = queue.popleft()
        for y in sorted(g.neighbors[x]):
            if y not in owner:
                owner[y] = owner[x]
                sets[owner[x]].add(y)
                queue.append(y)
    fs = [frozenset(b) for b in sets]
    return MinorModel(fs[0], fs[1], tuple(fs[2:]))


def bond_from_minor(g: Graph, m: MinorModel) -> Bond:
    require_connected(g)
    check_minor_model(g, m)
    full = absorb_uncovered(g, m)
    bond = verify_bond(g, full.side_a)
    if not isinstance(bond, Bond):
        raise GraphError(f"model did not yield a bond: {bond}")
    return bond


def st_bond_from_minor(g: Graph, s: int, t: int, m: MinorModel) -> Bond:
    """An st-bond of size >= k from a K_{2,2k} model of a 2-connected graph.

    The returned side contains ``s``.
    """
    if s == t:
        raise GraphError("s and t must differ")
    if not is_biconnected(g):
        raise GraphError("graph is not 2-vertex-connected")
    check_minor_model(g, m)
    if len(m.legs) < 2:
        raise GraphError("need at least two legs")
    k = len(m.legs) // 2
    m = absorb_uncovered(g, m)
    legs = list(m.legs)

    def where(v):
        if v in m.side_a:
            return "a", None
        if v in m.side_b:
            return "b", None
        return "x", next(i for i, leg in enumerate(legs) if v in leg)

    ws, wt = where(s), where(t)
    if ws != wt:
        # s and t in distinct branch sets: pick a pole for each
        for p, q in ((m.side_a, m.side_b), (m.side_b, m.side_a)):
            pole_s = ws[0] == "x" or s in p
            pole_t = wt[0] == "x" or t in q
            if not (pole_s and pole_t):
                continue
            xs = ws[1] if ws[0] == "x" else None
            xt = wt[1] if wt[0] == "x" else None
            if xs is None:
                xs = next(i for i in range(len(legs)) if i != xt)
            side = p | legs[xs]
            if t in side:
                continue
            bond = verify_bond(g, side)
            if isinstance(bond, Bond):
                return bond
        raise GraphError("could not separate s and t along the model")  # pragma: no cover

    # same branch set: U = pole ∪ one leg containing both
    if ws[0] == "b":
        pole, leg = m.side_b, legs[-1]
    elif ws[0] == "a":
        pole, leg = m.side_a, legs[-1]
    else:
        pole, leg = m.side_a, legs[ws[1]]
    U = pole | leg
    Q = frozenset(g.vertices) - U
    v = min(Q)
    p_s, p_t = internally_disjoint_paths(g, s, t, v)

    def prefix(path):
        out = []
        for x in path:
            if x not in U:
                break
            out.append(x)
        return out

    pre_s, pre_t = set(prefix(p_s)), set(prefix(p_t))
    # spanning tree of G[U] rooted at s; each vertex follows its first marked ancestor
    parent = {s: None}
    order = [s]
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y in sorted(g.neighbors[x]):
            if y in U and y not in parent:
                parent[y] = x
                order.append(y)
                queue.append(y)
    label = {}
    for x in order:
        if x in pre_s:
            label[x] = "s"
        elif x in pre_t:
            label[x] = "t"
        else:
            label[x] = label[parent[x]]
    U_s = frozenset(x for x in U if label[x] == "s")

    def between(a, b):
        return sum(1 for x, y, _ in g.edges if (x in a and y in b) or (x in b and y in a))

    side = U_s if between(U_s, Q) >= k else U_s | Q
    bond = verify_bond(g, side)
    if not isinstance(bond, Bond):
        raise GraphError(f"U-split did not yield a bond: {bond}")  # pragma: no cover
    return bond


# --- win/win preprocessing ---

@dataclass(frozen=True)
class EarlyYes:
    bond: Bond


def winwin_preprocess(g: Graph, k: int) -> EarlyYes | TreeDecomposition:
    require_connected(g)
    model = find_k2k_minor(g, k)
    if model is not None:
        return EarlyYes(bond_from_minor(g, model))
    return heuristic_tree_decomposition(g)


@dataclass(frozen=True)
class PathBlock:
    """A block on the s-t block path, in reduced-graph ids."""
    vertices: tuple[int, ...]          # reduced ids of the block's vertices
    graph: Graph                       # the block relabeled 0..|B|-1
    entry: int                         # block-local id of s'
    exit: int                          # block-local id of t'
    td: TreeDecomposition              # decomposition of ``graph``


@dataclass(frozen=True)
class ReducedInstance:
    graph: Graph
    td: TreeDecomposition
    vertex_map: tuple[int, ...]        # reduced id -> original id
    s: int
    t: int
    blocks: tuple[PathBlock, ...] = field(default=())


def lift_block_side(g: Graph, block_vertices: Iterable[int], block_edge_ids: Iterable[int],
                    side: Iterable[int]) -> frozenset:
    """Extend a side of a block to the whole graph.

    Removing the block's edges leaves one component per block vertex; each
    component follows its block vertex.
    """
    bv = set(block_vertices)
    drop = set(block_edge_ids)
    rest = Graph(g.num_vertices, tuple(e for i, e in enumerate(g.edges) if i not in drop),
                 g.multigraph, g.weighted)
    side = set(side)
    out = set()
    for comp in connected_components(rest):
        anchor = comp & bv
        if anchor and next(iter(anchor)) in side:
            out |= comp
    return frozenset(out)


def st_preprocess(g: Graph, s: int, t: int, k: int | None) -> EarlyYes | ReducedInstance:
    """Keep the blocks on the s-t path; certify early or decompose each block.

    ``k=None`` skips the minor search and always returns the reduced instance.
    """
    require_connected(g)
    if s == t:
        raise GraphError("s and t must differ")
    bct = block_cut_tree(g)
    path = bct.block_path(s, t)
    keep_vertices = sorted(set().union(*(bct.blocks[b] for b in path)))
    keep_edges = sorted(e for b in path for e in bct.block_edges[b])
    reduced, old = g.subgraph(keep_vertices, keep_edges)
    new_of = {v: i for i, v in enumerate(old)}

    blocks = []
    prev = s
    for pos, b in enumerate(path):
        bverts = sorted(bct.blocks[b])
        nxt = t if pos == len(path) - 1 else next(iter(bct.blocks[b] & bct.blocks[path[pos + 1]]))
        bgraph, bold = g.subgraph(bverts, bct.block_edges[b])
        local = {v: i for i, v in enumerate(bold)}
        entry, exit_ = local[prev], local[nxt]
        if bgraph.num_vertices == 2:
            if k is not None and k <= 1:
                side = lift_block_side(g, bverts, bct.block_edges[b], [prev])
                return EarlyYes(Bond.of(g, side))
            btd = TreeDecomposition((frozenset([0, 1]),))
        else:
            model = find_k2k_minor(bgraph, 2 * k) if k is not None else None
            if model is not None:
                trimmed = MinorModel(model.side_a, model.side_b, model.legs[: 2 * k])
                bb = st_bond_from_minor(bgraph, entry, exit_, trimmed)
                side = lift_block_side(g, bverts, bct.block_edges[b], [bold[x] for x in bb.side])
                return EarlyYes(Bond.of(g, side))
            btd = heuristic_tree_decomposition(bgraph)
        blocks.append(PathBlock(tuple(new_of[v] for v in bold), bgraph, entry, exit_, btd))
        prev = nxt

    # stitch block decompositions through singleton cut-vertex bags
    bags: list[frozenset] = []
    edges: list[tuple[int, int]] = []
    offsets = []
    for pb in blocks:
        off = len(bags)
        offsets.append(off)
        bags.extend(frozenset(pb.vertices[x] for x in bag) for bag in pb.td.bags)
        edges.extend((a + off, b + off) for a, b in pb.td.tree_edges)
    for i in range(len(blocks) - 1):
        u = blocks[i].vertices[blocks[i].exit]
        cut = len(bags)
        bags.append(frozenset([u]))
        for j in (i, i + 1):
            pb = blocks[j]
            local = pb.vertices.index(u)
            bag_id = next(x for x, bag in enumerate(pb.td.bags) if local in bag)
            edges.append((cut, offsets[j] + bag_id))
    td = TreeDecomposition(tuple(bags), tuple(edges))
    return ReducedInstance(reduced, td, tuple(old), new_of[s], new_of[t], tuple(blocks))
