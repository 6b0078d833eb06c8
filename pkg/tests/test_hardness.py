import random

import pytest

from sparsepart.graph import build_graph, complete_graph, cycle_graph, girth, path_graph
from sparsepart.partition import I, O, PartitionSpec, exact_solve, feasible_colors
from sparsepart.hardness import (
    BadSpec,
    ClauseSizeViolation,
    Gadget,
    MissingGadget,
    NotFound,
    OccurrenceViolation,
    PreconditionViolated,
    RoleViolated,
    TooLarge,
    WitnessSatisfiable,
    brute_force_sat,
    build_A_prime,
    build_H,
    build_reduction,
    certify_gadget,
    default_catalog,
    format_dimacs_cnf,
    mine_gadget,
    parse_dimacs_cnf,
    random_relaxed_cnf,
    random_restricted_cnf,
    soundness_check,
    validate_cnf,
)

P3, O3 = PartitionSpec.path(3), PartitionSpec.order(3)

# unsatisfiable for (I, P3), minimum degree 2, has a 2-vertex
A_WITNESS = build_graph([(0, 1), (0, 2), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (3, 4), (4, 5)], 6)


@pytest.fixture(scope="module")
def catalog():
    return default_catalog(P3)


def test_validate_examples():
    K = validate_cnf([(1, 2), (1, 2), (-1, -2)])
    assert K.variable_count == 2
    assert all(sum(1 for _, _, pos in occ if pos) == 2 for occ in K.occurrences().values())
    with pytest.raises(ClauseSizeViolation):
        validate_cnf([(1, 2, 3, -1)])
    with pytest.raises(OccurrenceViolation):
        validate_cnf([(1, 2), (1, -2), (1, 2)])


def test_dimacs_round_trip():
    K = validate_cnf([(1, 2), (1, 2), (-1, -2)])
    again = parse_dimacs_cnf("c planar=1\n" + format_dimacs_cnf(K))
    assert again.clauses == K.clauses
    assert again.claimed_planar is True


def test_small_strict_instances_are_satisfiable():
    rng = random.Random(0)
    for _ in range(50):
        assert brute_force_sat(random_restricted_cnf(rng.choice([2, 3]), rng)) is not None


def test_build_H_on_k4():
    H, Hp, case, edge = build_H(complete_graph(4), P3)
    assert case in (1, 2, 3)
    assert feasible_colors(H.graph, H.ports["v"], P3) == {I}
    assert feasible_colors(Hp.graph, Hp.ports["w"], P3) == {O}
    assert girth(H.graph) >= 3


def test_build_H_rejects_satisfiable_witness():
    with pytest.raises(WitnessSatisfiable):
        build_H(cycle_graph(5), P3)


def test_certify_rejects_a_bare_edge():
    gd = Gadget(path_graph(2), "ForceI", {"v": 0}, P3)
    with pytest.raises(RoleViolated):
        certify_gadget(gd)


def test_certify_rejects_leaky_transmitter():
    gd = Gadget(path_graph(3), "Transmitter", {"s": 0, "e": 2}, P3)
    with pytest.raises(RoleViolated) as info:
        certify_gadget(gd)
    c = info.value.counterexample
    assert c[0] is O and c[2] is I


def test_certify_size_limit():
    gd = Gadget(cycle_graph(40), "ForceI", {"v": 0}, P3)
    with pytest.raises(TooLarge):
        certify_gadget(gd)


def test_certificates_are_reproducible(catalog):
    for gd in catalog:
        assert certify_gadget(gd, P3, limit=gd.graph.n) == gd.certificate


def test_mined_transmitter_facts(catalog):
    tr = next(g for g in catalog if g.role == "Transmitter")
    cert = tr.certificate
    assert cert.fact("II") and cert.fact("OO") and not cert.fact("OI")


def test_mining_outcomes():
    gi = mine_gadget("ForceI", P3, max_n=10)
    assert gi.certificate is not None and gi.graph.n <= 10
    assert isinstance(mine_gadget("Transmitter", P3, max_n=2), NotFound)


def test_force_o_for_o3_attached_to_a_fresh_vertex():
    fo = mine_gadget("ForceO", O3)
    assert feasible_colors(fo.graph, fo.ports["w"], O3) == {O}
    # a pendant fresh vertex u next to w may take either colour
    g = fo.graph.add_edges([(fo.ports["w"], fo.graph.n)], fo.graph.n + 1)
    assert feasible_colors(g, fo.graph.n, O3) == {I, O}


def test_reduction_counts(catalog):
    K = validate_cnf([(1, 2), (1, 2), (-1, -2)])
    R = build_reduction(K, catalog, P3)
    assert len(R.variables) == 2 and len(R.clauses) == 3
    assert len(R.transmitters) == K.literal_count == 3 * K.variable_count
    assert girth(R.graph) >= R.girth_floor
    assert soundness_check(K, R, P3)


def test_reduction_errors(catalog):
    with pytest.raises(BadSpec):
        build_reduction(validate_cnf([], 0), catalog, P3)
    with pytest.raises(BadSpec):
        build_reduction(validate_cnf([(1, 2), (1, 2), (-1, -2)]), catalog, PartitionSpec.path(2))
    with pytest.raises(MissingGadget):
        build_reduction(validate_cnf([(1, 2), (1, 2), (-1, -2)]), catalog[:1], P3)


def test_fillers_are_forced(catalog):
    K = validate_cnf([(1, 2), (1, 2), (-1, -2)])
    R = build_reduction(K, catalog, P3)
    forced = exact_solve(R.graph, P3)
    for fill in R.fillers:
        for f in fill:
            assert forced[f] is O


def test_soundness_on_unsatisfiable_controls(catalog):
    for clauses in ([(1,), (-1,)], [(1, 2), (-1,), (-2,)], [(1, 2, 3), (-1,), (-2,), (-3,)]):
        K = validate_cnf(clauses, relaxed=True)
        assert brute_force_sat(K) is None
        R = build_reduction(K, catalog, P3)
        assert exact_solve(R.graph, P3) is None


def test_soundness_fuzz(catalog):
    rng = random.Random(5)
    for _ in range(10):
        K = random_relaxed_cnf(rng.choice([2, 3]), rng)
        assert soundness_check(K, build_reduction(K, catalog, P3), P3)


def test_soundness_empty_instance():
    assert soundness_check(validate_cnf([], 0), None, P3)


def test_A_prime():
    out = build_A_prime(A_WITNESS, P3)
    assert out.force_o.graph.max_degree() <= A_WITNESS.max_degree()
    assert feasible_colors(out.B.graph, out.B.ports["v"], P3) == {I}
    assert feasible_colors(out.force_o.graph, out.force_o.ports["w"], P3) == {O}


def test_A_prime_preconditions():
    g = A_WITNESS.add_edges([(0, 6)], 7)
    with pytest.raises(PreconditionViolated):
        build_A_prime(g, P3)
    with pytest.raises(PreconditionViolated):
        build_A_prime(complete_graph(4), P3)
    with pytest.raises(WitnessSatisfiable):
        build_A_prime(cycle_graph(5), P3)
