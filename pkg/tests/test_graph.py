from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import small_graphs
from sparsepart.graph import (
    build_graph,
    chains,
    complete_graph,
    components,
    cycle_graph,
    degeneracy_order,
    disjoint_union,
    format_edge_list,
    gen_sparse,
    girth,
    grid_graph,
    is_connected,
    parse_edge_list,
    path_graph,
    petersen_graph,
    subdivide,
)
from sparsepart.mad import mad_exact


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def test_build_rejects_loops_and_bad_ids():
    with pytest.raises(ValueError):
        build_graph([(0, 0)], 2)
    with pytest.raises(ValueError):
        build_graph([(0, 5)], 3)


def test_duplicate_edges_rejected():
    with pytest.raises(ValueError):
        build_graph([(0, 1), (1, 0)], 2)


@pytest.mark.parametrize(
    "g, expected",
    [(complete_graph(4), 3), (cycle_graph(7), 7), (petersen_graph(), 5), (grid_graph(3, 3), 4)],
)
def test_girth_known(g, expected):
    assert girth(g) == expected


def test_girth_forest_is_infinite():
    assert girth(path_graph(6)) == float("inf")


@settings(max_examples=150, deadline=None)
@given(small_graphs(max_n=11))
def test_girth_matches_networkx(g):
    h = to_nx(g)
    try:
        cyc = min(len(c) for c in nx.minimum_cycle_basis(h))
    except ValueError:
        cyc = float("inf")
    # the shortest cycle always lies in a minimum cycle basis
    assert girth(g) == cyc


def test_subdivision_girth():
    for t in range(4):
        assert girth(subdivide(complete_graph(4), t)) == 3 * (t + 1)


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=10))
def test_components_match_networkx(g):
    ours = sorted(sorted(c) for c in components(g))
    theirs = sorted(sorted(c) for c in nx.connected_components(to_nx(g)))
    assert ours == theirs
    assert is_connected(g) == (g.n > 0 and nx.is_connected(to_nx(g)))


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=10))
def test_degeneracy_order_is_permutation(g):
    order = degeneracy_order(g)
    assert sorted(order) == list(range(g.n))


def test_chains_of_a_theta():
    # two 3-vertices joined by paths of length 1, 2 and 3
    g = build_graph([(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 1)], 5)
    found, cycles = chains(g)
    assert not cycles
    lengths = sorted(len(c.internal) for c in found)
    assert lengths == [1, 2]


def test_edge_list_round_trip():
    g = petersen_graph()
    text = format_edge_list(g, ["a comment"])
    assert parse_edge_list(text).edges() == g.edges()


def test_edge_list_metadata():
    g = parse_edge_list("c girth=5\nc planar=1\np 3 2\ne 0 1\ne 1 2\n")
    assert g.metadata.get("claimed_girth") == 5 or g.metadata.get("girth") == 5
    with pytest.raises(ValueError):
        parse_edge_list("p 3 5\ne 0 1\n")


def test_disjoint_union_offsets():
    g, offsets = disjoint_union(cycle_graph(3), path_graph(2))
    assert g.n == 5 and g.m == 4 and offsets == [0, 3]


@pytest.mark.parametrize("seed", range(15))
def test_gen_sparse_respects_cap(seed):
    cap = Fraction(5, 2)
    g = gen_sparse(12 + seed, cap, seed)
    assert is_connected(g)
    assert mad_exact(g)[0] < cap


def test_gen_sparse_is_deterministic():
    a = gen_sparse(20, Fraction(12, 5), 4)
    b = gen_sparse(20, Fraction(12, 5), 4)
    assert a.edges() == b.edges()
