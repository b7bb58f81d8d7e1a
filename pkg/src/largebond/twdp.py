"""Largest bond by dynamic programming over a nice tree decomposition.

A state is a pair ``(rho1, rho2)``: for each side of the cut, the partition of
the bag vertices on that side induced by the connected components of the
partial solution.  The side set ``S`` is the union of the parts of ``rho1``.
Two sentinels cover an empty bag side:

* ``EMPTY = ()``  -- no vertex of that side has been introduced yet;
* ``FORGOTTEN = ((),)`` -- exactly one component, already fully forgotten.

A side with a forgotten component *and* other components can never become
connected again, so such states are never generated.

Edges are introduced exactly once (see ``make_nice``), so the join step adds
child values without a correction term.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .decomposition import (FORGET, INTRODUCE, INTRODUCE_EDGE, JOIN, LEAF, EarlyYes,
                            NiceTreeDecomposition, ReducedInstance, TreeDecomposition,
                            heuristic_tree_decomposition, lift_block_side, make_nice,
                            st_preprocess, validate_nice, winwin_preprocess)
from .graph import Bond, Graph, GraphError, block_cut_tree, require_connected, verify_bond

EMPTY: tuple = ()
FORGOTTEN: tuple = ((),)

Partition = tuple  # tuple of sorted vertex tuples, parts ordered by first element
State = tuple  # (rho1, rho2)


def canonical(parts) -> Partition:
    return tuple(sorted(tuple(sorted(p)) for p in parts))


def side_of(rho: Partition) -> frozenset:
    return frozenset(v for part in rho for v in part)


def _add_singleton(rho: Partition, v: int) -> Partition | None:
    if rho == FORGOTTEN:
        return None
    return canonical(rho + ((v,),))


def _merge_two(rho: Partition, u: int, v: int) -> Partition:
    pu = next(p for p in rho if u in p)
    pv = next(p for p in rho if v in p)
    if pu is pv or pu == pv:
        return rho
    return canonical([p for p in rho if p is not pu and p is not pv] + [pu + pv])


def _forget(rho: Partition, v: int) -> Partition | None:
    parts = []
    emptied = False
    for p in rho:
        if v in p:
            q = tuple(x for x in p if x != v)
            if q:
                parts.append(q)
            else:
                emptied = True
        else:
            parts.append(p)
    if not emptied:
        return tuple(parts)
    return FORGOTTEN if not parts else None


@lru_cache(maxsize=1 << 18)
def merge_partitions(a: Partition, b: Partition) -> Partition | None:
    """Join-node combination of two children's partitions of the same side set."""
    if a in (EMPTY, FORGOTTEN) or b in (EMPTY, FORGOTTEN):
        if a == EMPTY:
            return b
        if b == EMPTY:
            return a
        return None  # two forgotten components
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in a + b:
        for x in p:
            parent.setdefault(x, x)
        r = find(p[0])
        for x in p[1:]:
            parent[find(x)] = r
    groups: dict = {}
    for x in parent:
        groups.setdefault(find(x), []).append(x)
    return canonical(groups.values())


def bell(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def state_bound(bag_size: int) -> int:
    # an empty bag still carries the four sentinel combinations
    return max(bell(bag_size + 1) * 2 ** bag_size, 4)


@dataclass
class DPResult:
    value: int
    side: frozenset
    tables: list[dict] | None = None
    max_states: int = 0


def run_tw_dp(g: Graph, ntd: NiceTreeDecomposition, forced: dict[int, int] | None = None,
              keep_tables: bool = False, check_bound: bool = False) -> DPResult:
    """Evaluate the DP bottom-up and reconstruct an optimal side.

    ``forced`` maps vertices to the side (1 or 2) they must take.  Each table
    maps a state to ``(value, back-pointer)``.
    """
    forced = forced or {}
    tables: list[dict] = []
    max_states = 0
    for node in ntd.nodes:
        tab: dict = {}
        kind = node.kind
        if kind == LEAF:
            tab[(EMPTY, EMPTY)] = (0, None)
        elif kind == INTRODUCE:
            v = node.vertex
            for st, (val, _) in tables[node.children[0]].items():
                r1, r2 = st
                if forced.get(v, 1) == 1:
                    n1 = _add_singleton(r1, v)
                    if n1 is not None:
                        _offer(tab, (n1, r2), val, st)
                if forced.get(v, 2) == 2:
                    n2 = _add_singleton(r2, v)
                    if n2 is not None:
                        _offer(tab, (r1, n2), val, st)
        elif kind == INTRODUCE_EDGE:
            u, v, _ = g.edges[node.edge]
            for st, (val, _) in tables[node.children[0]].items():
                r1, r2 = st
                s1 = side_of(r1)
                if (u in s1) != (v in s1):
                    _offer(tab, st, val + 1, st)
                elif u in s1:
                    _offer(tab, (_merge_two(r1, u, v), r2), val, st)
                else:
                    _offer(tab, (r1, _merge_two(r2, u, v)), val, st)
        elif kind == FORGET:
            v = node.vertex
            for st, (val, _) in tables[node.children[0]].items():
                r1, r2 = st
                if any(v in p for p in r1):
                    n1 = _forget(r1, v)
                    if n1 is not None:
                        _offer(tab, (n1, r2), val, st)
                else:
                    n2 = _forget(r2, v)
                    if n2 is not None:
                        _offer(tab, (r1, n2), val, st)
        elif kind == JOIN:
            left, right = (tables[c] for c in node.children)
            by_side: dict = {}
            for st, (val, _) in right.items():
                by_side.setdefault(side_of(st[0]), []).append((st, val))
            for st1, (val1, _) in left.items():
                for st2, val2 in by_side.get(side_of(st1[0]), ()):
                    n1 = merge_partitions(st1[0], st2[0])
                    if n1 is None:
                        continue
                    n2 = merge_partitions(st1[1], st2[1])
                    if n2 is None:
                        continue
                    _offer(tab, (n1, n2), val1 + val2, (st1, st2))
        else:
            raise GraphError(f"unknown node kind {kind}")
        if check_bound and len(tab) > state_bound(len(node.bag)):
            raise AssertionError(f"state count {len(tab)} exceeds bound at {node}")
        max_states = max(max_states, len(tab))
        tables.append(tab)

    final = (FORGOTTEN, FORGOTTEN)
    root = tables[ntd.root]
    if final not in root:
        raise GraphError("no bond exists (graph disconnected or fewer than two vertices)")
    side = _reconstruct(ntd, tables, final)
    return DPResult(root[final][0], side, tables if keep_tables else None, max_states)


def _offer(tab: dict, key, value: int, back) -> None:
    cur = tab.get(key)
    if cur is None or value > cur[0]:
        tab[key] = (value, back)


def _reconstruct(ntd: NiceTreeDecomposition, tables: list[dict], final: State) -> frozenset:
    side: set = set()
    stack = [(ntd.root, final)]
    while stack:
        i, st = stack.pop()
        side |= side_of(st[0])
        node = ntd.nodes[i]
        back = tables[i][st][1]
        if node.kind == LEAF:
            continue
        if node.kind == JOIN:
            stack.append((node.children[0], back[0]))
            stack.append((node.children[1], back[1]))
        else:
            stack.append((node.children[0], back))
    return frozenset(side)


def largest_bond_tw(g: Graph, ntd: NiceTreeDecomposition, check_bound: bool = False) -> Bond:
    require_connected(g)
    if g.num_vertices < 2:
        raise GraphError("a bond needs at least two vertices")
    validate_nice(ntd, g)
    res = run_tw_dp(g, ntd, check_bound=check_bound)
    bond = verify_bond(g, res.side)
    if not isinstance(bond, Bond) or bond.size != res.value:
        raise AssertionError(f"witness reconstruction failed: {bond}")  # pragma: no cover
    return bond


def augment_with_terminals(td: TreeDecomposition, s: int, t: int) -> TreeDecomposition:
    return TreeDecomposition(tuple(b | {s, t} for b in td.bags), td.tree_edges)


def largest_st_bond_tw(g: Graph, s: int, t: int, ntd: NiceTreeDecomposition | None = None,
                       td: TreeDecomposition | None = None) -> Bond:
    """Maximum bond with ``s`` on the reported side and ``t`` opposite.

    The decomposition gets ``s`` and ``t`` added to every bag; pass either a
    plain decomposition ``td`` or a nice one (its bags are reused).
    """
    require_connected(g)
    if s == t:
        raise GraphError("s and t must differ")
    if td is None:
        td = ntd.underlying() if ntd is not None else heuristic_tree_decomposition(g)
    aug = make_nice(augment_with_terminals(td, s, t), g)
    res = run_tw_dp(g, aug, forced={s: 1, t: 2})
    bond = verify_bond(g, res.side)
    if not isinstance(bond, Bond) or bond.size != res.value:
        raise AssertionError(f"witness reconstruction failed: {bond}")  # pragma: no cover
    return bond


@dataclass(frozen=True)
class Answer:
    """Decision answer with its witness.

    ``optimum`` is ``None`` when the answer came from a minor certificate and
    the exact optimum was never computed.
    """
    yes: bool
    bond: Bond
    optimum: int | None
    k: int | None
    via: str  # "minor" | "dp"


def solve_largest_bond(g: Graph, k: int | None = None) -> Answer:
    require_connected(g)
    if g.num_vertices < 2:
        raise GraphError("a bond needs at least two vertices")
    if k is not None:
        pre = winwin_preprocess(g, k)
        if isinstance(pre, EarlyYes):
            return Answer(True, pre.bond, None, k, "minor")
        td = pre
    else:
        td = heuristic_tree_decomposition(g)
    bond = largest_bond_tw(g, make_nice(td, g))
    return Answer(k is None or bond.size >= k, bond, bond.size, k, "dp")


def solve_largest_st_bond(g: Graph, s: int, t: int, k: int | None = None) -> Answer:
    require_connected(g)
    if s == t:
        raise GraphError("s and t must differ")
    if k is not None:
        pre = st_preprocess(g, s, t, k)
        if isinstance(pre, EarlyYes):
            return Answer(True, pre.bond, None, k, "minor")
    else:
        pre = st_preprocess(g, s, t, None)
    bond = best_st_bond_over_blocks(g, pre)
    return Answer(k is None or bond.size >= k, bond, bond.size, k, "dp")


def best_st_bond_over_blocks(g: Graph, red: ReducedInstance) -> Bond:
    """Exact st-bond: the best entry-exit bond over the blocks on the s-t path."""
    bct = block_cut_tree(g)
    best = None
    for pb in red.blocks:
        orig = [red.vertex_map[x] for x in pb.vertices]
        if pb.graph.num_vertices == 2:
            local_side = [pb.entry]
        else:
            local_side = largest_st_bond_tw(pb.graph, pb.entry, pb.exit, td=pb.td).side
        block_id = next(i for i, b in enumerate(bct.blocks) if b == frozenset(orig))
        side = lift_block_side(g, orig, bct.block_edges[block_id], [orig[x] for x in local_side])
        bond = Bond.of(g, side)
        if best is None or bond.size > best.size:
            best = bond
    return best
