import itertools
import random

import pytest

from corpus import (BOWTIE, C4, K4, P3, atlas_connected, complete_bipartite, cycle, path,
                    random_connected)
from largebond.decomposition import (INTRODUCE, INTRODUCE_EDGE, TreeDecomposition,
                                     heuristic_tree_decomposition, make_nice)
from largebond.graph import Graph, GraphError, connected_components
from largebond.oracle import largest_bond_bf, largest_st_bond_bf
from largebond.twdp import (EMPTY, FORGOTTEN, bell, canonical, largest_bond_tw,
                            largest_st_bond_tw, merge_partitions, run_tw_dp,
                            solve_largest_bond, solve_largest_st_bond, state_bound)


def _nice(g):
    return make_nice(heuristic_tree_decomposition(g), g)


# --- examples ---

def test_c6():
    td = heuristic_tree_decomposition(cycle(6))
    assert td.width == 2
    assert largest_bond_tw(cycle(6), make_nice(td, cycle(6))).size == 2


def test_k4_clique_bag():
    td = TreeDecomposition((frozenset(range(4)),))
    assert largest_bond_tw(K4, make_nice(td, K4)).size == 4


def test_p5():
    assert largest_bond_tw(path(5), _nice(path(5))).size == 1


def test_st_examples():
    assert largest_st_bond_tw(C4, 0, 2).size == 2
    assert largest_st_bond_tw(K4, 0, 1).size == 4
    assert largest_st_bond_tw(P3, 0, 2).size == 1


def test_st_orientation():
    b = largest_st_bond_tw(BOWTIE, 4, 0)
    assert 4 in b.side and 0 not in b.side


def test_solve_k29():
    ans = solve_largest_bond(complete_bipartite(2, 9), 9)
    assert ans.yes and ans.via == "minor" and ans.bond.size >= 9


def test_solve_c8():
    ans = solve_largest_bond(cycle(8), 3)
    assert not ans.yes and ans.optimum == 2


def test_solve_k4():
    ans = solve_largest_bond(K4, 4)
    assert ans.yes and ans.bond.size == 4


def test_solve_st_bowtie():
    yes = solve_largest_st_bond(BOWTIE, 0, 3, 2)
    assert yes.yes and yes.bond.size >= 2
    no = solve_largest_st_bond(BOWTIE, 0, 3, 3)
    assert not no.yes and no.optimum == 2


def test_solve_st_c4():
    ans = solve_largest_st_bond(C4, 0, 1, 2)
    assert ans.yes and ans.bond.size == 2


def test_rejects_bad_input():
    with pytest.raises(GraphError):
        solve_largest_bond(Graph(3, ((0, 1),)))
    with pytest.raises(GraphError):
        solve_largest_st_bond(C4, 1, 1)


# --- partitions ---

def test_merge_partitions_sentinels():
    assert merge_partitions(EMPTY, EMPTY) == EMPTY
    assert merge_partitions(FORGOTTEN, EMPTY) == FORGOTTEN
    assert merge_partitions(EMPTY, FORGOTTEN) == FORGOTTEN
    assert merge_partitions(FORGOTTEN, FORGOTTEN) is None


def test_merge_partitions_union():
    a = canonical([(1, 2), (3,), (4,)])
    b = canonical([(1,), (2,), (3, 4)])
    assert merge_partitions(a, b) == ((1, 2), (3, 4))
    assert merge_partitions(a, canonical([(2, 3), (1,), (4,)])) == ((1, 2, 3), (4,))


def test_bell_numbers():
    assert [bell(k) for k in range(7)] == [1, 1, 2, 5, 15, 52, 203]


# --- exactness ---

def test_matches_oracle_on_small_graphs():
    for g in atlas_connected(6):
        ntd = _nice(g)
        assert largest_bond_tw(g, ntd, check_bound=True).size == largest_bond_bf(g).size
        for s, t in itertools.permutations(g.vertices, 2):
            b = largest_st_bond_tw(g, s, t, ntd=ntd)
            assert b.size == largest_st_bond_bf(g, s, t).size
            assert s in b.side and t not in b.side


def test_multigraph_support():
    g = Graph(3, ((0, 1), (0, 1), (1, 2), (0, 2)), multigraph=True)
    assert largest_bond_tw(g, _nice(g)).size == largest_bond_bf(g).size == 3


def test_relabeling_invariance():
    rng = random.Random(8)
    for _ in range(40):
        g = random_connected(rng, rng.randint(3, 9), 0.35)
        perm = list(range(g.num_vertices))
        rng.shuffle(perm)
        h = g.relabel(perm)
        assert solve_largest_bond(g).optimum == solve_largest_bond(h).optimum
        s, t = rng.sample(range(g.num_vertices), 2)
        assert (solve_largest_st_bond(g, s, t).optimum
                == solve_largest_st_bond(h, perm[s], perm[t]).optimum)


# --- table soundness against explicit enumeration ---

def _subtree_content(ntd):
    verts, edges = [], []
    for x in ntd.nodes:
        v = set().union(*(verts[c] for c in x.children)) if x.children else set()
        e = set().union(*(edges[c] for c in x.children)) if x.children else set()
        if x.kind == INTRODUCE:
            v.add(x.vertex)
        if x.kind == INTRODUCE_EDGE:
            e.add(x.edge)
        verts.append(v)
        edges.append(e)
    return verts, edges


def _side_state(g, verts, edge_ids, side, bag):
    """Partition of ``side`` restricted to the bag, or a sentinel, or None if infeasible."""
    if not side:
        return EMPTY
    sub = Graph(g.num_vertices, tuple(g.edges[i] for i in edge_ids
                                      if g.edges[i][0] in side and g.edges[i][1] in side),
                g.multigraph)
    comps = [c for c in connected_components(sub) if c <= side]
    inside = [c for c in comps if c & bag]
    outside = [c for c in comps if not c & bag]
    if outside:
        return FORGOTTEN if len(comps) == 1 else None
    return canonical(sorted(c & bag) for c in inside)


def _expected_table(g, verts, edge_ids, bag):
    best = {}
    vs = sorted(verts)
    for r in range(len(vs) + 1):
        for side in itertools.combinations(vs, r):
            side = set(side)
            other = set(vs) - side
            s1 = _side_state(g, verts, edge_ids, side, bag)
            s2 = _side_state(g, verts, edge_ids, other, bag)
            if s1 is None or s2 is None:
                continue
            val = sum(1 for i in edge_ids if (g.edges[i][0] in side) != (g.edges[i][1] in side))
            key = (s1, s2)
            best[key] = max(best.get(key, -1), val)
    return best


def test_tables_match_enumeration():
    for g in atlas_connected(5) + [BOWTIE, cycle(6), complete_bipartite(2, 4)]:
        ntd = _nice(g)
        res = run_tw_dp(g, ntd, keep_tables=True)
        verts, edges = _subtree_content(ntd)
        for i, x in enumerate(ntd.nodes):
            got = {k: v for k, (v, _) in res.tables[i].items()}
            assert got == _expected_table(g, verts[i], edges[i], x.bag), (g, x)


def test_state_bound_holds():
    rng = random.Random(2)
    for _ in range(20):
        g = random_connected(rng, rng.randint(6, 14), 0.3)
        ntd = _nice(g)
        res = run_tw_dp(g, ntd, check_bound=True)
        assert res.max_states <= max(state_bound(len(x.bag)) for x in ntd.nodes)
