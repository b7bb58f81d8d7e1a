import itertools

import pytest

from corpus import BOWTIE, C4, K2, K4, P3, atlas_connected, complete, cycle, star
from largebond.graph import Graph, GraphError, is_bond, verify_bond
from largebond.oracle import (OracleGuardError, connectivity_table, enumerate_bonds,
                              is_yutsis_bf, largest_bond_bf, largest_bond_side_size_bf,
                              largest_st_bond_bf, largest_weight_bond_bf, max_cut_bf)
from largebond.generators import xi_power

SMALL = atlas_connected(6)


@pytest.mark.parametrize("n", range(3, 11))
def test_cycle_bond_is_two(n):
    assert largest_bond_bf(cycle(n)).size == 2


def test_star_bond_is_one():
    assert largest_bond_bf(star(3)).size == 1


def test_k4_bond():
    assert largest_bond_bf(K4).size == 4


def test_tie_break_smallest_bitset():
    # every 2+2 split ties at 4; mask 0b0011 is the smallest
    assert largest_bond_bf(K4).side == frozenset({0, 1})


def test_st_examples():
    assert largest_st_bond_bf(C4, 0, 2).size == 2
    assert largest_st_bond_bf(P3, 0, 2).size == 1
    assert largest_st_bond_bf(BOWTIE, 0, 3).size == 2


def test_st_orientation():
    b = largest_st_bond_bf(BOWTIE, 3, 0)
    assert 3 in b.side and 0 not in b.side


def test_side_size_examples():
    assert largest_bond_side_size_bf(K4, 1).size == 3
    assert largest_bond_side_size_bf(K4, 2).size == 4
    b = largest_bond_side_size_bf(P3, 1)
    assert b.size == 1 and b.side in ({0}, {2})


def test_side_size_none_when_impossible():
    assert largest_bond_side_size_bf(star(3), 2) is None


def test_weighted_examples():
    assert largest_weight_bond_bf(xi_power(P3, 1).graph).weight == 2
    zero = Graph(4, tuple((u, v, 0) for u, v, _ in C4.edges))
    assert largest_weight_bond_bf(zero).weight == 0
    assert largest_weight_bond_bf(xi_power(P3, 2).graph).weight == 4


def test_max_cut_examples():
    assert max_cut_bf(K4)[0] == 4
    assert max_cut_bf(cycle(5))[0] == 4
    assert max_cut_bf(K2)[0] == 1


def test_enumerate_counts():
    assert len(enumerate_bonds(K2)) == 1
    assert len(enumerate_bonds(P3)) == 2
    assert len(enumerate_bonds(C4)) == 6  # frozen oracle count


def test_enumerated_sides_contain_zero():
    assert all(0 in b.side for b in enumerate_bonds(K4))


def test_yutsis_examples():
    assert is_yutsis_bf(K4)
    assert is_yutsis_bf(cycle(5))  # every cycle meets the bound with equality
    assert is_yutsis_bf(star(3))  # bound is 1 and a leaf edge reaches it
    assert not is_yutsis_bf(complete(5))
    assert not is_yutsis_bf(BOWTIE)


def test_guard():
    with pytest.raises(OracleGuardError):
        largest_bond_bf(cycle(25))


def test_rejects_disconnected_and_trivial():
    with pytest.raises(GraphError):
        largest_bond_bf(Graph(3, ((0, 1),)))
    with pytest.raises(GraphError):
        largest_bond_bf(Graph(1))


def test_connectivity_table_matches_bfs():
    for g in SMALL[::5]:
        table = connectivity_table(g)
        for mask in range(1, 1 << g.num_vertices):
            side = [v for v in g.vertices if mask >> v & 1]
            assert table[mask] == g.induced_connected(side)


def test_oracle_invariants():
    for g in SMALL:
        best = largest_bond_bf(g)
        assert isinstance(verify_bond(g, best.side), type(best))
        for s, t in itertools.permutations(g.vertices, 2):
            st = largest_st_bond_bf(g, s, t)
            assert st.size <= best.size and s in st.side and t not in st.side
        by_size = [largest_bond_side_size_bf(g, l) for l in range(1, g.num_vertices)]
        assert best.size == max(b.size for b in by_size if b is not None)
        assert largest_weight_bond_bf(g).size == best.size
        assert max_cut_bf(g)[0] >= best.size
        assert all(is_bond(g, b.side) for b in enumerate_bonds(g))
