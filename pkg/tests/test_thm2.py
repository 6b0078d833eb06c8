import json
import random
from fractions import Fraction

import pytest

from sparsepart.graph import build_graph, complete_graph, cycle_graph, gen_sparse, petersen_graph
from sparsepart.mad import mad_exact
from sparsepart.partition import I, O, PartitionSpec, verify
from sparsepart.thm2 import (
    DischargeParams,
    Exhausted,
    OutcomeKind,
    PreconditionViolated,
    RepairState,
    TokenOrderViolation,
    assert_structural_lemmas,
    check_pi,
    discharge_thm2,
    is_terminal,
    p_sub,
    solve_iok,
)


def struct_key(st):
    d = st.to_dict(include_graph=False)
    d.pop("coloring")
    return json.dumps(d, sort_keys=True)


def random_script(rng, st, steps=40):
    """Apply random mutations, checkpoints, releases and rollbacks; check
    every rollback restores exactly the part of the state it covers."""
    g = st.g
    live = []  # (token, colour hash, structure key)
    for _ in range(steps):
        op = rng.random()
        v = rng.randrange(g.n)
        if op < 0.15:
            tok = st.checkpoint()
            live.append((tok, st.color_hash(), struct_key(st)))
        elif op < 0.22 and live:
            tok = live.pop()[0]
            st.release(tok)
        elif op < 0.32 and live:
            i = rng.randrange(len(live))
            tok, ch, sk = live[i]
            scope = rng.choice(["all", "color", "struct"])
            st.rollback(tok, scope)
            del live[i + 1 :]
            if scope in ("all", "color"):
                assert st.color_hash() == ch
            if scope in ("all", "struct"):
                assert struct_key(st) == sk
            if scope != "all":
                # finish the job so later snapshots stay comparable
                st.rollback(tok, "struct" if scope == "color" else "color")
            assert st.color_hash() == ch and struct_key(st) == sk
        elif op < 0.45:
            st.set_color(v, rng.choice([I, O]))
        elif op < 0.6:
            st.set_mark(v, rng.randrange(3))
        elif op < 0.7:
            st.set_supervised(v, rng.sample(range(g.n), rng.randrange(3)))
        elif op < 0.78:
            st.add_free_cluster(rng.sample(range(g.n), 2))
        elif op < 0.9:
            w = rng.choice(g.adjacency[v])
            st.set_giving(v, w)
        else:
            w = rng.choice(g.adjacency[v])
            st.add_neutral(v, w)
    while live:
        tok, ch, sk = live.pop(0)
        st.rollback(tok, "all")
        assert st.color_hash() == ch and struct_key(st) == sk
        live.clear()


def test_rollback_fuzz_1000_scripts():
    g = petersen_graph()
    for seed in range(1000):
        rng = random.Random(seed)
        st = RepairState(g, 3)
        random_script(rng, st)


def test_release_must_be_newest():
    st = RepairState(cycle_graph(5), 2)
    a = st.checkpoint()
    st.checkpoint()
    with pytest.raises(TokenOrderViolation):
        st.release(a)


def test_rollback_discards_newer_tokens():
    st = RepairState(cycle_graph(5), 2)
    a = st.checkpoint()
    b = st.checkpoint()
    st.set_color(0, I)
    st.rollback(a)
    assert st.coloring[0] is None
    with pytest.raises(TokenOrderViolation):
        st.rollback(b)


def test_state_serialisation_round_trip():
    st = RepairState(petersen_graph(), 3)
    st.set_color(0, I)
    st.set_mark(1, 2)
    st.set_supervised(1, [0])
    st.add_neutral(2, 3)
    st.set_giving(4, 3)
    again = RepairState.from_dict(json.loads(json.dumps(st.to_dict())))
    assert again.state_hash() == st.state_hash()


def test_p_sub_precondition():
    st = RepairState(cycle_graph(6), 2)
    with pytest.raises(PreconditionViolated):
        p_sub(st, 0)


def test_p_sub_neutral_edge():
    # v in O marked twice with an I-neighbour marked twice
    g = cycle_graph(4)
    st = RepairState(g, 2, [O, I, O, O])
    st.set_mark(0, 2)
    st.set_mark(1, 2)
    out = p_sub(st, 0)
    assert out.kind is OutcomeKind.NEUTRAL_EDGE_SET
    assert frozenset((0, 1)) in st.neutral


def test_pi_detects_violation():
    g = build_graph([(0, 1), (1, 2), (1, 3)], 4)
    st = RepairState(g, 2, [O, O, O, O])
    assert check_pi(st)
    st.set_mark(0, 1)
    assert not check_pi(st)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_solves_below_threshold(k):
    cap = Fraction(8 * k, 3 * k + 1)
    for seed in range(25):
        g = gen_sparse(6 + seed % 20, cap, 1000 * k + seed)
        seen = []
        c = solve_iok(g, k, debug=True, on_boundary=lambda s: seen.extend(assert_structural_lemmas(s)))
        assert not isinstance(c, Exhausted)
        assert verify(g, c, PartitionSpec.order(k)) is None
        assert seen == []


def test_recursive_oracle():
    g = gen_sparse(18, Fraction(12, 5), 3)
    c = solve_iok(g, 3, oracle_policy="recursive")
    assert verify(g, c, PartitionSpec.order(3)) is None


@pytest.mark.parametrize("k", range(2, 11))
def test_discharge_identity(k):
    p = DischargeParams(k)
    assert p.M == Fraction(8 * k, 3 * k + 1)
    assert k * (4 - Fraction(3, 2) * p.M) == p.M / 2
    assert p.identity_holds()


def test_exhausted_states_audit_cleanly():
    seen = 0
    for g, k in [(petersen_graph(), 3), (complete_graph(4), 2), (complete_graph(5), 3)]:
        out = solve_iok(g, k)
        if isinstance(out, Exhausted) and out.reason == "exhausted":
            assert is_terminal(out.state)
            ledger = discharge_thm2(out.core, out.state, DischargeParams(k))
            assert ledger.conserved()
            assert not ledger.violations()
            assert mad_exact(out.core)[0] >= DischargeParams(k).M
            seen += 1
    assert seen >= 1
