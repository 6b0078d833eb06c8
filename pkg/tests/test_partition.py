import pytest
from hypothesis import given, settings, strategies as st

from conftest import small_graphs
from sparsepart.graph import build_graph, complete_graph, cycle_graph, path_graph, star_graph
from sparsepart.partition import (
    ColoringFormatError,
    I,
    NotColoredO,
    O,
    PartitionSpec,
    Saturation,
    SearchBudgetExceeded,
    ViolationKind,
    brute_force_satisfiable,
    exact_solve,
    feasible_colors,
    format_coloring,
    parse_coloring,
    saturation,
    verify,
)

P3, O3 = PartitionSpec.path(3), PartitionSpec.order(3)


def test_spec_parse():
    assert PartitionSpec.parse("o3") == O3
    assert PartitionSpec.parse("P5") == PartitionSpec.path(5)
    assert PartitionSpec.parse("ok", 4) == PartitionSpec.order(4)
    assert str(P3) == "P3"
    with pytest.raises(ValueError):
        PartitionSpec.parse("x3")
    with pytest.raises(ValueError):
        PartitionSpec.parse("pk")


def test_verify_kinds():
    g = path_graph(4)
    assert verify(g, [I, I, O, O], O3).kind is ViolationKind.ADJACENT_I_PAIR
    assert verify(g, [O, O, O, O], O3).kind is ViolationKind.OVERSIZE_COMPONENT
    assert verify(g, [I, O, None, O], O3).kind is ViolationKind.UNSET_VERTEX
    assert verify(star_graph(3), [O, O, O, O], PartitionSpec.order(4)) is None
    assert verify(star_graph(3), [O, O, O, O], PartitionSpec.path(4)).kind is ViolationKind.NON_PATH_COMPONENT
    assert verify(g, [I, O, O, I], P3) is None


def test_triangle_in_o_is_not_a_path():
    assert verify(complete_graph(3), [O, O, O], O3) is None
    assert verify(complete_graph(3), [O, O, O], P3).kind is ViolationKind.NON_PATH_COMPONENT


def test_k4_outcomes():
    k4 = complete_graph(4)
    assert exact_solve(k4, P3) is None
    c = exact_solve(k4, O3)
    assert c is not None and verify(k4, c, O3) is None


def test_saturation():
    g = path_graph(4)
    c = [O, O, O, I]
    assert saturation(g, c, 1, O3) is Saturation.SATURATED
    assert saturation(g, c, 0, O3) is Saturation.SATURATED
    assert saturation(g, [O, I, O, O], 0, O3) is Saturation.UNSATURATED
    assert saturation(g, [O, I, O, O], 2, O3) is Saturation.INTERMEDIATE
    with pytest.raises(NotColoredO):
        saturation(g, c, 3, O3)


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_n=10), st.sampled_from(["o2", "o3", "p2", "p3", "o4", "p4"]))
def test_exact_agrees_with_enumeration(g, text):
    spec = PartitionSpec.parse(text)
    c = exact_solve(g, spec)
    assert (c is not None) == brute_force_satisfiable(g, spec)
    if c is not None:
        assert verify(g, c, spec) is None


@settings(max_examples=80, deadline=None)
@given(small_graphs(max_n=9, min_n=2), st.sampled_from(["o3", "p3"]))
def test_feasible_colors_agree_with_enumeration(g, text):
    spec = PartitionSpec.parse(text)
    for col in (I, O):
        assert (col in feasible_colors(g, 0, spec)) == brute_force_satisfiable(g, spec, {0: col})


def test_fixed_colours_respected():
    g = cycle_graph(6)
    c = exact_solve(g, O3, fixed={0: O, 1: O})
    assert c[0] is O and c[1] is O
    assert exact_solve(g, O3, fixed={0: I, 1: I}) is None


def test_budget():
    with pytest.raises(SearchBudgetExceeded):
        exact_solve(complete_graph(12), P3, max_nodes=1)


def test_coloring_round_trip():
    c = [I, O, None, O]
    assert parse_coloring(format_coloring(c), 4) == c
    with pytest.raises(ColoringFormatError):
        parse_coloring("0 X\n", 1)
    with pytest.raises(ColoringFormatError):
        parse_coloring("x I\n", 1)
    with pytest.raises(ColoringFormatError):
        parse_coloring("5 I\n", 3)
    # missing vertices are unset, which verify reports
    assert parse_coloring("0 I\n", 3) == [I, None, None]
