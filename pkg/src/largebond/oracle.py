"""Exhaustive reference solvers.

Every side ``S`` with ``0 in S`` is enumerated as a bitmask.  Connectivity of
all vertex subsets is tabulated once with numpy: a set of two or more vertices
is connected iff removing some vertex leaves a connected set that the vertex
is adjacent to (a leaf of any spanning tree works).
"""
from __future__ import annotations

import numpy as np

from .graph import Bond, Graph, GraphError, require_connected, yutsis_bound

MAX_VERTICES = 24


class OracleGuardError(GraphError):
    pass


def _guard(g: Graph) -> None:
    if g.num_vertices > MAX_VERTICES:
        raise OracleGuardError(f"oracle limited to {MAX_VERTICES} vertices, got {g.num_vertices}")


def _popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).astype(np.int8)


def connectivity_table(g: Graph) -> np.ndarray:
    """Boolean array indexed by vertex bitmask: is the induced subgraph connected."""
    n = g.num_vertices
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    pc = _popcount(masks)
    adj = np.array(g.adjacency_masks, dtype=np.int64)
    conn = np.zeros(size, dtype=bool)
    conn[1 << np.arange(n)] = True
    layers = [np.flatnonzero(pc == k) for k in range(n + 1)]
    for k in range(2, n + 1):
        layer = layers[k]
        hit = np.zeros(layer.shape, dtype=bool)
        for v in range(n):
            bit = np.int64(1) << v
            has = (layer & bit) != 0
            rest = layer ^ bit
            hit |= has & conn[rest] & ((adj[v] & rest) != 0)
        conn[layer] = hit
    return conn


def _side_masks(g: Graph) -> np.ndarray:
    """All masks with bit 0 set, excluding the full vertex set."""
    n = g.num_vertices
    full = (1 << n) - 1
    masks = np.arange(1, 1 << n, 2, dtype=np.int64)
    return masks[masks != full]


def _edge_cut_counts(g: Graph, masks: np.ndarray, weights: bool = False) -> np.ndarray:
    out = np.zeros(masks.shape, dtype=np.int32)
    for u, v, w in g.edges:
        if weights and w == 0:
            continue
        out += (((masks >> u) ^ (masks >> v)) & 1).astype(np.int32)
    return out


def _mask_to_side(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _bond_masks(g: Graph) -> np.ndarray:
    require_connected(g)
    _guard(g)
    if g.num_vertices < 2:
        raise GraphError("a bond needs at least two vertices")
    conn = connectivity_table(g)
    full = (1 << g.num_vertices) - 1
    masks = _side_masks(g)
    return masks[conn[masks] & conn[full ^ masks]]


def _best(g: Graph, masks: np.ndarray, key: np.ndarray) -> Bond | None:
    if masks.size == 0:
        return None
    # argmax picks the first maximum, i.e. the smallest side bitmask
    return Bond.of(g, _mask_to_side(int(masks[int(np.argmax(key))])))


def largest_bond_bf(g: Graph) -> Bond:
    masks = _bond_masks(g)
    return _best(g, masks, _edge_cut_counts(g, masks))


def largest_st_bond_bf(g: Graph, s: int, t: int) -> Bond:
    if s == t:
        raise GraphError("s and t must differ")
    masks = _bond_masks(g)
    full = (1 << g.num_vertices) - 1
    # flip masks so that s is always on the reported side
    oriented = np.where((masks >> s) & 1 == 1, masks, full ^ masks)
    keep = ((oriented >> t) & 1) == 0
    oriented = oriented[keep]
    return _best(g, oriented, _edge_cut_counts(g, oriented))


def largest_bond_side_size_bf(g: Graph, l: int) -> Bond | None:
    """Best bond one of whose sides has exactly ``l`` vertices (reported as the side)."""
    masks = _bond_masks(g)
    n = g.num_vertices
    full = (1 << n) - 1
    pc = _popcount(masks)
    oriented = np.where(pc == l, masks, full ^ masks)
    keep = (pc == l) | (n - pc == l)
    oriented = oriented[keep]
    return _best(g, oriented, _edge_cut_counts(g, oriented))


def largest_weight_bond_bf(g: Graph) -> Bond:
    masks = _bond_masks(g)
    weight = _edge_cut_counts(g, masks, weights=True).astype(np.int64)
    size = _edge_cut_counts(g, masks).astype(np.int64)
    return _best(g, masks, weight * (g.num_edges + 1) + size)


def max_cut_bf(g: Graph) -> tuple[int, frozenset]:
    _guard(g)
    if g.num_vertices == 0:
        return 0, frozenset()
    masks = np.arange(1, 1 << g.num_vertices, 2, dtype=np.int64)
    if g.num_vertices == 1:
        return 0, frozenset([0])
    cuts = _edge_cut_counts(g, masks)
    i = int(np.argmax(cuts))
    return int(cuts[i]), _mask_to_side(int(masks[i]))


def enumerate_bonds(g: Graph) -> list[Bond]:
    return [Bond.of(g, _mask_to_side(int(m))) for m in _bond_masks(g)]


def is_yutsis_bf(g: Graph) -> bool:
    return largest_bond_bf(g).size == yutsis_bound(g)
