from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import small_graphs
from sparsepart.graph import build_graph, complete_graph, cycle_graph, empty_graph, grid_graph, path_graph, petersen_graph, star_graph
from sparsepart.mad import EmptyGraph, TooLarge, density, mad_below, mad_bruteforce, mad_exact, two_core


@pytest.mark.parametrize(
    "g, value",
    [
        (complete_graph(4), Fraction(3)),
        (complete_graph(5), Fraction(4)),
        (cycle_graph(9), Fraction(2)),
        (path_graph(5), Fraction(8, 5)),
        (star_graph(4), Fraction(8, 5)),
        (petersen_graph(), Fraction(3)),
        (grid_graph(3, 4), Fraction(17, 6)),
    ],
)
def test_known_values(g, value):
    assert mad_exact(g)[0] == value


def test_witness_attains_value():
    g = build_graph([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)], 6)
    value, witness = mad_exact(g)
    assert value == 3
    assert witness == frozenset({0, 1, 2, 3})
    assert density(g, witness) == value


def test_edgeless_and_empty():
    assert mad_exact(empty_graph(3))[0] == 0
    with pytest.raises(EmptyGraph):
        mad_exact(empty_graph(0))


def test_bruteforce_limit():
    with pytest.raises(TooLarge):
        mad_bruteforce(empty_graph(25))


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_n=10))
def test_matches_bruteforce(g):
    assert mad_exact(g)[0] == mad_bruteforce(g)


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=10))
def test_mad_below_agrees(g):
    value = mad_exact(g)[0]
    assert mad_below(g, value + Fraction(1, 1000))
    assert not mad_below(g, value)


def test_two_core_drops_trees():
    g = build_graph([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 5)
    assert sorted(two_core(g)) == [0, 1, 2]
