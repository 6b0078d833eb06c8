"""Journaled colouring repair for (I, O_k)-partitions below 8k/(3k+1).

Two procedures work on a :class:`RepairState`.  ``p_gen`` starts from a
valid partition of ``G - v`` for a 2-vertex ``v``, tries to extend it, and
otherwise puts ``v`` in O and repairs the resulting oversize component by
calling ``p_sub`` on its 3+-vertices.  ``p_sub`` tries to move an O-vertex to
I, recursively fixing the components that grow as a result; when it cannot,
it records a cluster set or a neutral edge.  Marks (0, 1, 2), cluster sets,
giving edges and neutral edges are the structure that the discharging audit
consumes when no partition is found.
"""

from __future__ import annotations

import enum
import hashlib
import json
import sys
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .charges import ChargeLedger
from .graph import Graph, build_graph, components
from .partition import Color, I, O, PartitionSpec, exact_solve, verify


class PreconditionViolated(ValueError):
    pass


class TokenOrderViolation(RuntimeError):
    pass


class OracleFailed(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    pass


class LoopCapExceeded(RuntimeError):
    pass


# -- state and journal ----------------------------------------------------------


@dataclass(eq=False)
class Token:
    serial: int
    color_pos: int
    struct_pos: int


_MISSING = object()


class RepairState:
    """Colouring, marks and cluster structure with an undo journal.

    Colour changes and structure changes (marks, cluster sets, giving and
    neutral edges) go to separate logs so either can be rolled back alone.
    Tokens nest: only the newest may be released, and rolling back to a
    token discards every token taken after it.
    """

    def __init__(self, g: Graph, k: int, coloring=None):
        self.g = g
        self.k = k
        self.coloring: list[Optional[Color]] = list(coloring) if coloring else [None] * g.n
        self.marks = [0] * g.n
        self.supervised: dict[int, frozenset] = {}
        self.free_clusters: list[frozenset] = []
        self.giving: dict[int, tuple[int, int]] = {}
        self.neutral: set[frozenset] = set()
        self._clog: list[tuple] = []
        self._slog: list[tuple] = []
        self._tokens: list[Token] = []
        self._serial = 0

    # mutations
    def set_color(self, v: int, col: Color) -> None:
        if self._tokens:
            self._clog.append((v, self.coloring[v]))
        self.coloring[v] = col

    def set_mark(self, v: int, m: int) -> None:
        if self._tokens:
            self._slog.append(("mark", v, self.marks[v]))
        self.marks[v] = m

    def set_supervised(self, v: int, members) -> None:
        if self._tokens:
            self._slog.append(("sup", v, self.supervised.get(v, _MISSING)))
        self.supervised[v] = frozenset(members)

    def add_free_cluster(self, members) -> None:
        if self._tokens:
            self._slog.append(("free", len(self.free_clusters), None))
        self.free_clusters.append(frozenset(members))

    def set_giving(self, x: int, y: int) -> None:
        if self._tokens:
            self._slog.append(("give", x, self.giving.get(x, _MISSING)))
        self.giving[x] = (x, y)

    def add_neutral(self, u: int, v: int) -> None:
        e = frozenset((u, v))
        if self._tokens:
            self._slog.append(("neutral", e, e in self.neutral))
        self.neutral.add(e)

    # journal
    def checkpoint(self) -> Token:
        self._serial += 1
        tok = Token(self._serial, len(self._clog), len(self._slog))
        self._tokens.append(tok)
        return tok

    def _position(self, tok: Token) -> int:
        for i, t in enumerate(self._tokens):
            if t is tok:
                return i
        raise TokenOrderViolation(f"token {tok.serial} is not live")

    def release(self, tok: Token) -> None:
        if not self._tokens or self._tokens[-1] is not tok:
            raise TokenOrderViolation(f"token {tok.serial} is not the newest live token")
        self._tokens.pop()
        if not self._tokens:
            self._clog.clear()
            self._slog.clear()

    def rollback(self, tok: Token, scope: str = "all") -> None:
        if scope not in ("all", "color", "struct"):
            raise ValueError(f"unknown rollback scope {scope!r}")
        pos = self._position(tok)
        del self._tokens[pos + 1 :]
        if scope in ("all", "color"):
            while len(self._clog) > tok.color_pos:
                v, old = self._clog.pop()
                self.coloring[v] = old
        if scope in ("all", "struct"):
            while len(self._slog) > tok.struct_pos:
                self._undo_struct(self._slog.pop())

    def _undo_struct(self, entry: tuple) -> None:
        kind, key, old = entry
        if kind == "mark":
            self.marks[key] = old
        elif kind == "sup":
            if old is _MISSING:
                del self.supervised[key]
            else:
                self.supervised[key] = old
        elif kind == "free":
            del self.free_clusters[key:]
        elif kind == "give":
            if old is _MISSING:
                del self.giving[key]
            else:
                self.giving[key] = old
        else:
            if not old:
                self.neutral.discard(key)

    def drop_journal(self) -> None:
        self._tokens.clear()
        self._clog.clear()
        self._slog.clear()

    @property
    def live_tokens(self) -> int:
        return len(self._tokens)

    # queries
    def cluster_sets(self) -> list[tuple[Optional[int], frozenset]]:
        out: list[tuple[Optional[int], frozenset]] = [
            (v, s) for v, s in sorted(self.supervised.items())
        ]
        out += [(None, s) for s in self.free_clusters]
        return out

    def supervisors_of(self, w: int) -> list[int]:
        return sorted(v for v, s in self.supervised.items() if w in s)

    def color_hash(self) -> str:
        return hashlib.sha256(
            "".join("-" if c is None else c.value for c in self.coloring).encode()
        ).hexdigest()

    def state_hash(self) -> str:
        blob = json.dumps(self.to_dict(include_graph=False), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    # serialisation
    def to_dict(self, include_graph: bool = True) -> dict:
        d = {
            "k": self.k,
            "coloring": [None if c is None else c.value for c in self.coloring],
            "marks": list(self.marks),
            "clusters": [
                {"supervisor": sup, "members": sorted(s)}
                for sup, s in self.cluster_sets()
            ],
            "giving": sorted([x, y] for x, y in self.giving.values()),
            "neutral": sorted(sorted(e) for e in self.neutral),
        }
        if include_graph:
            d["n"] = self.g.n
            d["edges"] = [list(e) for e in self.g.edges()]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RepairState":
        g = build_graph([tuple(e) for e in d["edges"]], d["n"])
        st = cls(g, d["k"], [None if c is None else Color(c) for c in d["coloring"]])
        st.marks = list(d["marks"])
        if len(st.marks) != g.n or len(st.coloring) != g.n:
            raise ValueError("coloring/marks length does not match n")
        for cl in d["clusters"]:
            if cl["supervisor"] is None:
                st.free_clusters.append(frozenset(cl["members"]))
            else:
                st.supervised[cl["supervisor"]] = frozenset(cl["members"])
        for x, y in d["giving"]:
            st.giving[x] = (x, y)
        st.neutral = {frozenset(e) for e in d["neutral"]}
        return st


# -- outcomes -------------------------------------------------------------------


class OutcomeKind(enum.Enum):
    RECOLORED_TO_I = "RecoloredToI"
    NEUTRAL_EDGE_SET = "NeutralEdgeSet"
    CLUSTER_SET_BUILT = "ClusterSetBuilt"
    FULL_PARTITION_FOUND = "FullPartitionFound"


@dataclass(frozen=True)
class RepairOutcome:
    kind: OutcomeKind
    payload: object = None


class _Found(Exception):
    def __init__(self, coloring):
        super().__init__("partition found")
        self.coloring = coloring


def check_pi(state: RepairState) -> bool:
    """No 3+-vertex of O0 has an O1-neighbour, and no 2-vertex of O0 has one
    neighbour in O1 and the other in O."""
    return _pi_witness(state) is None


def _pi_witness(state: RepairState) -> int | None:
    g, c, mk = state.g, state.coloring, state.marks
    for x in range(g.n):
        if c[x] is not O or mk[x] != 0:
            continue
        nb = g.adjacency[x]
        if g.degree(x) >= 3:
            if any(c[w] is O and mk[w] == 1 for w in nb):
                return x
        elif g.degree(x) == 2:
            a, b = nb
            if (c[a] is O and mk[a] == 1 and c[b] is O) or (c[b] is O and mk[b] == 1 and c[a] is O):
                return x
    return None


# -- procedures -----------------------------------------------------------------


class _Engine:
    def __init__(self, state: RepairState, debug: bool = False, call_limit: int = 1_000_000):
        self.st = state
        self.g = state.g
        self.k = state.k
        self.debug = debug
        self.calls = 0
        self.call_limit = call_limit

    # helpers
    def o_component(self, v: int) -> set[int]:
        c, adj = self.st.coloring, self.g.adjacency
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for w in adj[x]:
                if c[w] is O and w not in comp:
                    comp.add(w)
                    queue.append(w)
        return comp

    def o0_component(self, v: int) -> set[int]:
        c, mk, adj = self.st.coloring, self.st.marks, self.g.adjacency
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for w in adj[x]:
                if c[w] is O and mk[w] == 0 and w not in comp:
                    comp.add(w)
                    queue.append(w)
        return comp

    def has_oversize(self) -> bool:
        seen: set[int] = set()
        for v in range(self.g.n):
            if self.st.coloring[v] is O and v not in seen:
                comp = self.o_component(v)
                if len(comp) > self.k:
                    return True
                seen |= comp
        return False

    def found_check(self) -> None:
        # I-vertices are never adjacent here, so no oversize component means done
        if not self.has_oversize():
            raise _Found(list(self.st.coloring))

    def _debug_entry(self, v: int) -> None:
        w = _pi_witness(self.st)
        if w is not None:
            raise InvariantViolation(f"property Pi fails at {w} on entry for {v}")
        for x in range(self.g.n):
            if self.st.coloring[x] is I and self.st.marks[x] == 1:
                raise InvariantViolation(f"vertex {x} is in I1")

    # X and C, with the put-in-I loop applied until it stops
    def settle(self, W: list[int]) -> tuple[set[int], set[int]]:
        c, g = self.st.coloring, self.g
        while True:
            X = {w for w in W if c[w] is O and len(self.o_component(w)) >= self.k + 1}
            C: set[int] = set()
            for x in sorted(X):
                if x not in C:
                    C |= self.o0_component(x)
            free = sorted(
                x for x in C - X if all(c[w] is O for w in g.adjacency[x])
            )
            if not free:
                free = self._pi_breakers(W)
            if not free:
                return X, C
            self.st.set_color(free[0], I)
            self.found_check()

    def _pi_breakers(self, W: list[int]) -> list[int]:
        # 2-vertices of O0 next to a recoloured W-vertex, with both neighbours
        # in O and one of them in O1; they go to I even when outside C
        c, mk, g = self.st.coloring, self.st.marks, self.g
        out = set()
        for w in W:
            if c[w] is not O:
                continue
            for u in g.adjacency[w]:
                if g.degree(u) != 2 or c[u] is not O or mk[u] != 0:
                    continue
                a, b = g.adjacency[u]
                if c[a] is O and c[b] is O and (mk[a] == 1 or mk[b] == 1):
                    out.add(u)
        return sorted(out)

    def mark_round(self, X: set[int], C: set[int]) -> None:
        for x in sorted(C - X):
            if self.g.degree(x) >= 3:
                self.st.set_mark(x, 1)
        for x in sorted(X):
            self.st.set_mark(x, 2)

    def sub(self, v: int) -> RepairOutcome:
        st, g, k = self.st, self.g, self.k
        self.calls += 1
        if self.calls > self.call_limit:
            raise LoopCapExceeded(f"more than {self.call_limit} repair calls")
        if st.coloring[v] is not O or st.marks[v] != 2:
            raise PreconditionViolated(f"vertex {v} must be in O and marked twice")
        if self.debug:
            self._debug_entry(v)
            entry_colors = st.color_hash()
        out = self._sub_body(v)
        if self.debug:
            w = _pi_witness(st)
            if w is not None:
                raise InvariantViolation(f"property Pi fails at {w} on exit for {v}")
            if out.kind is not OutcomeKind.RECOLORED_TO_I and st.color_hash() != entry_colors:
                raise InvariantViolation(f"colouring changed although {v} stayed in O")
        return out

    def _sub_body(self, v: int) -> RepairOutcome:
        st, g, k = self.st, self.g, self.k
        c, mk = st.coloring, st.marks
        W = sorted(w for w in g.adjacency[v] if c[w] is I)
        # step 1: an I-neighbour already marked twice
        for w in W:
            if mk[w] == 2:
                st.set_supervised(v, ())
                st.add_neutral(v, w)
                return RepairOutcome(OutcomeKind.NEUTRAL_EDGE_SET, (v, w))
        # step 2: an I-neighbour with another O2-neighbour
        for w in W:
            for u in g.adjacency[w]:
                if u != v and c[u] is O and mk[u] == 2:
                    st.set_supervised(v, (w,))
                    st.set_giving(w, u)
                    st.set_mark(w, 2)
                    return RepairOutcome(OutcomeKind.CLUSTER_SET_BUILT, frozenset((w,)))
        # step 3: an I-neighbour with an O1-neighbour
        for w in W:
            for u in g.adjacency[w]:
                if c[u] is O and mk[u] == 1:
                    st.set_supervised(v, (w,))
                    st.set_supervised(u, (w,))
                    st.set_mark(u, 2)
                    st.set_mark(w, 2)
                    return RepairOutcome(OutcomeKind.CLUSTER_SET_BUILT, frozenset((w,)))
        # step 4: swap v with its I-neighbours and repair
        twice_at_start = {x for x in range(g.n) if mk[x] == 2}
        tok = st.checkpoint()
        st.set_color(v, I)
        for w in W:
            if mk[w] != 0:
                raise InvariantViolation(f"I-neighbour {w} of {v} is marked once")
            st.set_color(w, O)
        self.found_check()
        X, C = self.settle(W)
        if not X:
            st.release(tok)
            return RepairOutcome(OutcomeKind.RECOLORED_TO_I, v)
        self.mark_round(X, C)
        while True:
            pending = [x for x in sorted(C - X) if mk[x] == 1]
            if not pending:
                break
            x = pending[0]
            st.set_mark(x, 2)
            self.sub(x)
            if c[x] is I:
                st.rollback(tok, "struct")
                X, C = self.settle(W)
                if not X:
                    st.release(tok)
                    return RepairOutcome(OutcomeKind.RECOLORED_TO_I, v)
                self.mark_round(X, C)
        # step 5: record the cluster set and undo the recolouring
        members: set[int] = set()
        for comp in components(g, C):
            part = {x for x in comp if g.degree(x) >= 3 or x in X}
            if len(comp) >= k + 1:
                members |= part
                continue
            pairs = sorted(
                (x, y)
                for x in comp
                if g.degree(x) >= 3
                for y in g.adjacency[x]
                if y in twice_at_start and c[y] is O
            )
            if pairs:
                members |= part
                st.set_giving(*pairs[0])
        st.set_supervised(v, members)
        st.rollback(tok, "color")
        st.release(tok)
        return RepairOutcome(OutcomeKind.CLUSTER_SET_BUILT, frozenset(members))

    def gen(self, v: int, base: list) -> RepairOutcome:
        st, g = self.st, self.g
        spec = PartitionSpec.order(self.k)
        if g.degree(v) != 2:
            raise PreconditionViolated(f"vertex {v} is not a 2-vertex")
        if st.marks[v] == 2 or any(st.marks[w] == 2 for w in g.adjacency[v]):
            raise PreconditionViolated(f"vertex {v} or a neighbour is marked twice")
        st.coloring = list(base)
        for col in (I, O):
            st.coloring[v] = col
            if verify(g, st.coloring, spec) is None:
                return RepairOutcome(OutcomeKind.FULL_PARTITION_FOUND, list(st.coloring))
        st.coloring[v] = O
        C = self.o0_component(v)
        for x in sorted(C):
            if g.degree(x) == 2 and all(st.coloring[w] is O for w in g.adjacency[x]):
                st.coloring[x] = I
                if verify(g, st.coloring, spec) is None:
                    return RepairOutcome(OutcomeKind.FULL_PARTITION_FOUND, list(st.coloring))
                st.coloring[x] = O
        twice_at_start = {x for x in range(g.n) if st.marks[x] == 2}
        for x in sorted(C):
            if g.degree(x) >= 3:
                st.set_mark(x, 1)
        while True:
            pending = [x for x in sorted(C) if st.marks[x] == 1]
            if not pending:
                break
            x = pending[0]
            st.set_mark(x, 2)
            try:
                self.sub(x)
            except _Found as hit:
                st.drop_journal()
                st.coloring = hit.coloring
                return RepairOutcome(OutcomeKind.FULL_PARTITION_FOUND, list(hit.coloring))
            if verify(g, st.coloring, spec) is None:
                return RepairOutcome(OutcomeKind.FULL_PARTITION_FOUND, list(st.coloring))
        S = frozenset(x for x in C if g.degree(x) >= 3)
        if S:
            st.add_free_cluster(S)
            pairs = sorted(
                (x, y)
                for x in S
                for y in g.adjacency[x]
                if y in twice_at_start and st.coloring[y] is O
            )
            if pairs:
                st.set_giving(*pairs[0])
        return RepairOutcome(OutcomeKind.CLUSTER_SET_BUILT, S)


def p_sub(state: RepairState, v: int, debug: bool = False) -> RepairOutcome:
    """Run the secondary repair procedure on an O-vertex marked twice."""
    _raise_recursion_limit(state.g.n)
    eng = _Engine(state, debug)
    try:
        return eng.sub(v)
    except _Found as hit:
        state.drop_journal()
        state.coloring = hit.coloring
        return RepairOutcome(OutcomeKind.FULL_PARTITION_FOUND, list(hit.coloring))


def p_gen(
    state: RepairState, v: int, sub_oracle: Callable[[Graph, int], Optional[list]], debug: bool = False
) -> RepairOutcome:
    """Run the main procedure for the 2-vertex ``v``.

    ``sub_oracle(g, v)`` must return a valid colouring of ``g - v`` (in the
    ids of ``g``, entry ``v`` ignored) or ``None`` if it has none.
    """
    _raise_recursion_limit(state.g.n)
    g, k = state.g, state.k
    base = sub_oracle(g, v)
    if base is None:
        raise OracleFailed(f"no partition of G - {v} is available")
    _check_base(g, k, v, base)
    return _Engine(state, debug).gen(v, base)


def _check_base(g: Graph, k: int, v: int, base: list) -> None:
    rest, keep = g.remove([v])
    sub = [base[x] for x in keep]
    if len(base) != g.n or verify(rest, sub, PartitionSpec.order(k)) is not None:
        raise OracleFailed(f"oracle colouring of G - {v} is not a valid partition")


def _raise_recursion_limit(n: int) -> None:
    want = 20 * n + 1000
    if sys.getrecursionlimit() < want:
        sys.setrecursionlimit(want)


# -- oracles and driver -------------------------------------------------------


def exact_oracle(k: int):
    spec = PartitionSpec.order(k)

    def oracle(g: Graph, v: int):
        rest, keep = g.remove([v])
        sub = exact_solve(rest, spec)
        if sub is None:
            return None
        out: list = [None] * g.n
        for new, old in enumerate(keep):
            out[old] = sub[new]
        return out

    return oracle


def recursive_oracle(k: int):
    def oracle(g: Graph, v: int):
        rest, keep = g.remove([v])
        sub = solve_iok(rest, k, oracle_policy="recursive")
        if isinstance(sub, Exhausted):
            return None
        out: list = [None] * g.n
        for new, old in enumerate(keep):
            out[old] = sub[new]
        return out

    return oracle


@dataclass
class Exhausted:
    """No partition was produced.  ``state`` lives on ``core`` (the input
    with degree <= 1 vertices peeled off); ``core_ids[i]`` is the input id of
    core vertex ``i``.  ``reason`` is ``"exhausted"`` when no eligible
    2-vertex remains, or ``"oracle"`` when some ``G - v`` had no partition."""

    state: RepairState
    core: Graph
    core_ids: tuple
    reason: str = "exhausted"
    rounds: int = 0


def _peel(g: Graph) -> tuple[list[int], list[int]]:
    """Core vertex list and the degree <= 1 removal order."""
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    order: list[int] = []
    stack = sorted((v for v in range(g.n) if deg[v] <= 1), reverse=True)
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        order.append(v)
        for w in g.adjacency[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)
    return [v for v in range(g.n) if alive[v]], order


def solve_iok(
    g: Graph,
    k: int,
    oracle_policy: str = "exact",
    debug: bool = False,
    on_boundary: Callable[[RepairState], None] | None = None,
):
    """An (I, O_k) colouring of ``g`` or :class:`Exhausted`."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if oracle_policy not in ("exact", "recursive"):
        raise ValueError(f"unknown oracle policy {oracle_policy!r}")
    core_ids, peeled = _peel(g)
    core = g.induced(core_ids)
    oracle = exact_oracle(k) if oracle_policy == "exact" else recursive_oracle(k)
    state = RepairState(core, k)
    result = None
    rounds = 0
    if core.n:
        if on_boundary:
            on_boundary(state)
        while result is None:
            v = next(
                (
                    x
                    for x in range(core.n)
                    if core.degree(x) == 2
                    and state.marks[x] != 2
                    and all(state.marks[w] != 2 for w in core.adjacency[x])
                ),
                None,
            )
            if v is None:
                return Exhausted(state, core, tuple(core_ids), "exhausted", rounds)
            rounds += 1
            if rounds > core.n:
                raise LoopCapExceeded(f"main procedure ran more than {core.n} times")
            try:
                out = p_gen(state, v, oracle, debug)
            except OracleFailed:
                if oracle(core, v) is None:
                    return Exhausted(state, core, tuple(core_ids), "oracle", rounds)
                raise
            if out.kind is OutcomeKind.FULL_PARTITION_FOUND:
                result = out.payload
            elif on_boundary:
                on_boundary(state)
    coloring: list = [None] * g.n
    for i, v in enumerate(core_ids):
        coloring[v] = result[i]
    for v in reversed(peeled):
        done = [w for w in g.adjacency[v] if coloring[w] is not None]
        coloring[v] = I if not done else coloring[done[0]].other()
    problem = verify(g, coloring, PartitionSpec.order(k))
    if problem is not None:
        raise InvariantViolation(f"solver produced an invalid colouring: {problem}")
    return coloring


# -- structural lemma suite ----------------------------------------------------


@dataclass(frozen=True)
class LemmaViolation:
    lemma: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.lemma}: {self.witness}"


def assert_structural_lemmas(state: RepairState) -> list[LemmaViolation]:
    """Check the structural facts that hold between main-procedure calls.

    Returns the list of violations (empty when everything holds).
    """
    g, mk, k = state.g, state.marks, state.k
    out: list[LemmaViolation] = []

    def bad(name, *witness):
        out.append(LemmaViolation(name, tuple(witness)))

    clusters = [s for _, s in state.cluster_sets()]
    membership: dict[int, list[frozenset]] = {}
    for s in clusters:
        for x in s:
            membership.setdefault(x, []).append(s)
    sups = {x: state.supervisors_of(x) for x in membership}

    for x in range(g.n):
        if mk[x] == 1:
            bad("gen_once", x)
        if mk[x] == 2:
            has_sup_nbr = any(g.has_edge(x, s) for s in sups.get(x, []))
            has_neutral = any(x in e for e in state.neutral)
            if not (has_sup_nbr or has_neutral or state.supervised.get(x)):
                bad("gen_P", x)
            if x not in membership:
                bad("mark_inter", x)
        if mk[x] == 0 and (x in state.supervised or x in state.giving):
            bad("noMnosub", x)
    for x, sets in membership.items():
        if mk[x] != 2:
            bad("inter_mark", x)
        if len(sets) > 2:
            bad("gen_inter", x, len(sets))
        elif len(sets) == 2 and (
            any(s != frozenset((x,)) for s in sets) or x in state.giving
        ):
            bad("gen_inter", x)
    for x, (_, w) in state.giving.items():
        if mk[x] != 2 or mk[w] != 2:
            bad("gen_give", x, w, "marks")
        if any(x in s and w in s for s in clusters):
            bad("gen_give", x, w, "same cluster")
        if x in state.supervised.get(w, ()) or w in state.supervised.get(x, ()):
            bad("gen_give", x, w, "subordinate")
        if state.giving.get(w) == (w, x):
            bad("gen_give", x, w, "mutual")
    for e in state.neutral:
        a, b = sorted(e)
        if mk[a] != 2 or mk[b] != 2:
            bad("gen_neutral", a, b, "marks")
        if a in state.supervised.get(b, ()) or b in state.supervised.get(a, ()):
            bad("gen_neutral", a, b, "subordinate")
        if any(a in s and b in s for s in clusters):
            bad("gen_neutral", a, b, "same cluster")
        if state.giving.get(a) == (a, b) or state.giving.get(b) == (b, a):
            bad("gen_neutral", a, b, "giving")
    for s in clusters:
        if not s:
            continue
        if len(s) == 1:
            (x,) = s
            if len(sups.get(x, [])) == 2:
                if state.supervised.get(x) or x in state.giving:
                    bad("gen_Sgood", x, "singleton with subordinates or giving edge")
                continue
        for comp in components(g, s):
            if any(x in state.giving for x in comp):
                continue
            if sum(g.degree(x) - 2 for x in comp) < k - 1:
                bad("gen_Sgood", tuple(sorted(comp)))
    for x in range(g.n):
        if g.degree(x) == 2 and mk[x] == 2:
            for s in sups.get(x, []):
                if not g.has_edge(x, s):
                    bad("gen_2sup", x, s)
    for v, s in state.supervised.items():
        if v in s:
            bad("cluster_connected", v, "supervisor in own set")
        elif len(components(g, set(s) | {v})) != 1:
            bad("cluster_connected", v)
    return out


# -- discharging -------------------------------------------------------------------


@dataclass(frozen=True)
class DischargeParams:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")

    @property
    def M(self) -> Fraction:
        return Fraction(8 * self.k, 3 * self.k + 1)

    @property
    def unit(self) -> Fraction:
        return self.M - 2

    @property
    def half_unit(self) -> Fraction:
        return (self.M - 2) / 2

    @property
    def tree_decrement_base(self) -> Fraction:
        return 4 - Fraction(3, 2) * self.M

    def identity_holds(self) -> bool:
        return self.k * self.tree_decrement_base == self.M / 2 and self.M < Fraction(8, 3)


def is_terminal(state: RepairState) -> bool:
    g, mk = state.g, state.marks
    return all(
        mk[v] == 2 or any(mk[w] == 2 for w in g.adjacency[v])
        for v in range(g.n)
        if g.degree(v) == 2
    )


def _bfs_tree(g: Graph, comp: set[int]) -> dict[int, list[int]]:
    root = min(comp)
    tree: dict[int, list[int]] = {v: [] for v in comp}
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for w in g.adjacency[x]:
            if w in comp and w not in seen:
                seen.add(w)
                tree[x].append(w)
                tree[w].append(x)
                queue.append(w)
    return tree


def _side(tree: dict[int, list[int]], u: int, v: int) -> set[int]:
    """Vertices of the component of ``v`` in ``T - u``."""
    side = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for w in tree[x]:
            if w != u and w not in side:
                side.add(w)
                stack.append(w)
    return side


def discharge_thm2(g: Graph, state: RepairState, params: DischargeParams) -> ChargeLedger:
    """Weights d(v) - M moved by the four steps; ``ledger.problems`` lists
    any transfer across a neutral edge or repeated on one edge."""
    if state.g.n != g.n or state.g.adjacency != g.adjacency:
        raise PreconditionViolated("state belongs to a different graph")
    if any(m == 1 for m in state.marks) or not is_terminal(state):
        raise PreconditionViolated("state is not a terminal state of the main loop")
    M, unit, half, base = params.M, params.unit, params.half_unit, params.tree_decrement_base
    mk = state.marks
    ledger = ChargeLedger({v: g.degree(v) - M for v in range(g.n)})
    for w in range(g.n):
        sups = state.supervisors_of(w)
        if len(sups) == 2:
            for s in sups:
                ledger.give(s, w, half, "step1")
    for v in range(g.n):
        if mk[v] == 2:
            for w in g.adjacency[v]:
                if mk[w] == 0:
                    ledger.give(v, w, unit, "step2")
    for v, (_, w) in sorted(state.giving.items()):
        ledger.give(w, v, unit, "step3")
    for _, s in state.cluster_sets():
        for comp in components(g, s):
            tree = _bfs_tree(g, comp)
            for u in sorted(tree):
                for v in sorted(tree[u]):
                    side = _side(tree, u, v)
                    if any(x in state.giving for x in side):
                        continue
                    n_tuv = sum(g.degree(x) - 2 for x in side)
                    amount = unit - n_tuv * base
                    if amount > 0:
                        ledger.give(u, v, amount, "step4")
    seen: dict[frozenset, int] = {}
    for t in ledger.transfers:
        e = frozenset((t.src, t.dst))
        if e in state.neutral:
            ledger.problems.append(f"l_neutral: transfer {t.src}->{t.dst} on a neutral edge")
        seen[e] = seen.get(e, 0) + 1
    for e, count in seen.items():
        if count > 1:
            ledger.problems.append(f"onlyone: {count} transfers between {sorted(e)}")
    return ledger
