"""Restricted 3-SAT reduction: forcing gadgets, transmitters and the graph J.

Truth is the colour I and falsehood the colour O.  A variable is a path on
three vertices (ends: positive occurrences, middle: negative occurrence), a
clause is a path on ``k + 1`` vertices whose non-literal vertices are forced
into O, and a transmitter joins every occurrence in a variable to the
matching clause vertex.  Every gadget behaviour used here is certified by an
exhaustive search before it is trusted.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .graph import Graph, build_graph, girth, is_connected
from .partition import Color, I, O, PartitionSpec, exact_solve, feasible_colors

DEFAULT_CERTIFY_LIMIT = 30


class CnfError(ValueError):
    pass


class ClauseSizeViolation(CnfError):
    pass


class OccurrenceViolation(CnfError):
    pass


class RoleViolated(RuntimeError):
    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class TooLarge(ValueError):
    pass


class WitnessSatisfiable(ValueError):
    pass


class NoRemovableEdge(ValueError):
    pass


class MissingGadget(LookupError):
    pass


class BadSpec(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


# -- CNF ------------------------------------------------------------------------


@dataclass(frozen=True)
class RestrictedCnf:
    """Clauses over variables ``1..variable_count`` as DIMACS literals.

    In strict mode every clause has 2 or 3 literals and every variable occurs
    exactly twice positively and once negatively.  Relaxed mode (used for
    unsatisfiable controls) allows clauses of size 1 to 3 and at most two
    positive and one negative occurrence.  Planarity is recorded, never
    checked.
    """

    variable_count: int
    clauses: tuple
    relaxed: bool = False
    claimed_planar: bool | None = None

    def occurrences(self) -> dict[int, list[tuple[int, int, bool]]]:
        """variable -> [(clause index, position, is_positive)]"""
        occ: dict[int, list] = {v: [] for v in range(1, self.variable_count + 1)}
        for ci, clause in enumerate(self.clauses):
            for pos, lit in enumerate(clause):
                occ[abs(lit)].append((ci, pos, lit > 0))
        return occ

    @property
    def literal_count(self) -> int:
        return sum(len(c) for c in self.clauses)


def validate_cnf(
    clauses: Iterable[Sequence[int]],
    variable_count: int | None = None,
    relaxed: bool = False,
    claimed_planar: bool | None = None,
) -> RestrictedCnf:
    cl = tuple(tuple(int(x) for x in c) for c in clauses)
    used = {abs(x) for c in cl for x in c}
    if 0 in used:
        raise CnfError("literal 0 is not allowed")
    nvars = variable_count if variable_count is not None else max(used, default=0)
    if any(v > nvars for v in used):
        raise CnfError("literal refers to a variable beyond the declared count")
    lo, hi = (1, 3) if relaxed else (2, 3)
    for i, c in enumerate(cl):
        if not lo <= len(c) <= hi:
            raise ClauseSizeViolation(f"clause {i} has {len(c)} literals")
        if len({abs(x) for x in c}) != len(c):
            raise ClauseSizeViolation(f"clause {i} repeats a variable")
    pos = {v: 0 for v in range(1, nvars + 1)}
    neg = dict(pos)
    for c in cl:
        for x in c:
            (pos if x > 0 else neg)[abs(x)] += 1
    for v in range(1, nvars + 1):
        if relaxed:
            ok = pos[v] <= 2 and neg[v] <= 1
        else:
            ok = pos[v] == 2 and neg[v] == 1
        if not ok:
            raise OccurrenceViolation(
                f"variable {v} occurs {pos[v]} times positively and {neg[v]} times negatively"
            )
    return RestrictedCnf(nvars, cl, relaxed, claimed_planar)


def parse_dimacs_cnf(text: str, relaxed: bool = False) -> RestrictedCnf:
    nvars = None
    nclauses = None
    planar = None
    tokens: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            if "planar=1" in line:
                planar = True
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"bad problem line {line!r}")
            nvars, nclauses = int(parts[2]), int(parts[3])
            continue
        tokens.extend(int(t) for t in line.split())
    if nvars is None:
        raise CnfError("missing 'p cnf' line")
    clauses, cur = [], []
    for t in tokens:
        if t == 0:
            clauses.append(cur)
            cur = []
        else:
            cur.append(t)
    if cur:
        raise CnfError("last clause is not terminated by 0")
    if nclauses is not None and len(clauses) != nclauses:
        raise CnfError(f"header announces {nclauses} clauses, found {len(clauses)}")
    return validate_cnf(clauses, nvars, relaxed=relaxed, claimed_planar=planar)


def format_dimacs_cnf(K: RestrictedCnf) -> str:
    lines = [f"p cnf {K.variable_count} {len(K.clauses)}"]
    lines += [" ".join(str(x) for x in c) + " 0" for c in K.clauses]
    return "\n".join(lines) + "\n"


def brute_force_sat(K: RestrictedCnf) -> dict[int, bool] | None:
    for bits in itertools.product((False, True), repeat=K.variable_count):
        val = dict(zip(range(1, K.variable_count + 1), bits))
        if all(any(val[abs(x)] == (x > 0) for x in c) for c in K.clauses):
            return val
    return None


def random_restricted_cnf(variables: int, rng: random.Random, tries: int = 1000) -> RestrictedCnf:
    """A uniformly shuffled strict instance on ``variables`` variables."""
    if variables < 2:
        raise CnfError("a strict instance needs at least two variables")
    lits = [v for v in range(1, variables + 1) for _ in (0, 1)] + [
        -v for v in range(1, variables + 1)
    ]
    total = len(lits)
    splits = [
        sizes
        for r in range(1, total // 2 + 1)
        for sizes in itertools.product((2, 3), repeat=r)
        if sum(sizes) == total
    ]
    for _ in range(tries):
        rng.shuffle(lits)
        sizes = rng.choice(splits)
        clauses, i = [], 0
        for s in sizes:
            clauses.append(lits[i : i + s])
            i += s
        try:
            return validate_cnf(clauses, variables)
        except CnfError:
            continue
    raise CnfError("could not draw a valid instance")


def random_relaxed_cnf(variables: int, rng: random.Random) -> RestrictedCnf:
    """A random relaxed instance; unlike strict ones these can be unsatisfiable."""
    lits = []
    for v in range(1, variables + 1):
        lits += [v] * rng.randint(0, 2) + [-v] * rng.randint(0, 1)
    if not lits:
        lits = [1]
    while True:
        rng.shuffle(lits)
        clauses, i = [], 0
        while i < len(lits):
            size = rng.randint(1, 3)
            clauses.append(lits[i : i + size])
            i += size
        try:
            return validate_cnf(clauses, variables, relaxed=True)
        except CnfError:
            continue


# -- gadgets and certificates -----------------------------------------------------


ROLES = ("ForceI", "ForceO", "Transmitter")


@dataclass(frozen=True)
class Certificate:
    spec: PartitionSpec
    role: str
    facts: tuple  # sorted (name, bool) pairs

    def fact(self, name: str) -> bool:
        return dict(self.facts)[name]

    def to_dict(self) -> dict:
        return {"spec": str(self.spec), "role": self.role, "facts": dict(self.facts)}


@dataclass
class Gadget:
    graph: Graph
    role: str
    ports: dict
    spec: PartitionSpec
    girth_floor: int = 3
    degree_cap: Optional[int] = None
    certificate: Optional[Certificate] = None
    provenance: str = ""

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": [list(e) for e in self.graph.edges()],
            "role": self.role,
            "ports": dict(self.ports),
            "spec": str(self.spec),
            "girth_floor": self.girth_floor,
            "degree_cap": self.degree_cap,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Gadget":
        spec = PartitionSpec.parse(d["spec"])
        g = build_graph([tuple(e) for e in d["edges"]], d["n"])
        return cls(
            g,
            d["role"],
            {k: int(v) for k, v in d["ports"].items()},
            spec,
            d.get("girth_floor", 3),
            d.get("degree_cap"),
            None,
            d.get("provenance", ""),
        )


def _query(g: Graph, spec: PartitionSpec, fixed: Mapping[int, Color]):
    return exact_solve(g, spec, fixed=dict(fixed))


def _transmitter_facts(g: Graph, spec: PartitionSpec, s: int, e: int, fixed=None) -> dict:
    base = dict(fixed or {})

    def clean(port):
        return {w: I for w in g.adjacency[port]}

    def q(assign):
        merged = dict(base)
        for v, col in assign.items():
            if merged.get(v, col) is not col:
                return None
            merged[v] = col
        return _query(g, spec, merged)

    return {
        "II": q({s: I, e: I}) is not None,
        "OO": q({s: O, e: O}) is not None,
        "OI": q({s: O, e: I}) is not None,
        "OO_clean": q({s: O, e: O, **clean(s), **clean(e)}) is not None,
        "IO_clean": q({s: I, e: O, **clean(e)}) is not None,
    }


def certify_gadget(
    gadget: Gadget, spec: PartitionSpec | None = None, limit: int = DEFAULT_CERTIFY_LIMIT
) -> Certificate:
    """Exhaustively establish the gadget's behaviour or raise RoleViolated.

    Each fact is decided by a complete search with the relevant ports pinned,
    so a negative fact is a proof that no valid colouring has that pattern.
    """
    spec = spec or gadget.spec
    g = gadget.graph
    if g.n > limit:
        raise TooLarge(f"gadget has {g.n} vertices, certification limit is {limit}")
    if girth(g) < gadget.girth_floor:
        raise RoleViolated(f"girth {girth(g)} is below the floor {gadget.girth_floor}")
    if gadget.degree_cap is not None and g.max_degree() > gadget.degree_cap:
        raise RoleViolated(f"max degree {g.max_degree()} exceeds the cap {gadget.degree_cap}")
    if gadget.role in ("ForceI", "ForceO"):
        port = gadget.ports["v"] if gadget.role == "ForceI" else gadget.ports["w"]
        want = I if gadget.role == "ForceI" else O
        some = exact_solve(g, spec)
        if some is None:
            raise RoleViolated("gadget has no valid colouring at all")
        other = exact_solve(g, spec, fixed={port: want.other()})
        if other is not None:
            raise RoleViolated(f"port {port} can be coloured {want.other().value}", other)
        facts = {"satisfiable": True, f"forced_{want.value}": True}
    else:
        s, e = gadget.ports["s"], gadget.ports["e"]
        facts = _transmitter_facts(g, spec, s, e)
        if facts["OI"]:
            witness = exact_solve(g, spec, fixed={s: O, e: I})
            raise RoleViolated("a colouring has s in O and e in I", witness)
        if not (facts["II"] and facts["OO"]):
            raise RoleViolated("transmitter lacks an I/I or O/O colouring")
    cert = Certificate(spec, gadget.role, tuple(sorted(facts.items())))
    gadget.certificate = cert
    return cert


# -- forcing gadgets from unsatisfiable witnesses ---------------------------------


class HPair(NamedTuple):
    H: Gadget
    H_prime: Gadget
    case: int
    edge: tuple


def _pendant(gadget_graph: Graph, v: int) -> tuple[Graph, int]:
    w = gadget_graph.n
    return gadget_graph.add_edges([(v, w)], gadget_graph.n + 1), w


def build_H(
    witness: Graph, spec: PartitionSpec, limit: int = DEFAULT_CERTIFY_LIMIT
) -> HPair:
    """ForceI gadget ``H`` (port ``v``) and ForceO gadget ``H'`` (port ``w``).

    Edges of the witness are scanned in lexicographic order; the first whose
    removal leaves a satisfiable graph ``G-`` decides one of three cases:
    the endpoints are I in every colouring, O in every colouring, or either.
    """
    if exact_solve(witness, spec) is not None:
        raise WitnessSatisfiable("the witness has a valid colouring")
    floor = girth(witness)
    floor = 3 if floor == float("inf") else int(floor)
    for x, y in witness.edges():
        minus = build_graph([e for e in witness.edges() if e != (x, y)], witness.n)
        if exact_solve(minus, spec) is None:
            continue
        pairs = {
            (a, b): _query(minus, spec, {x: a, y: b}) is not None
            for a in (I, O)
            for b in (I, O)
        }
        if pairs[(I, O)] or pairs[(O, I)]:
            raise AssertionError("endpoints of a critical edge took different colours")
        if pairs[(I, I)] and not pairs[(O, O)]:
            case, H, v = 1, minus, x
        elif pairs[(O, O)] and not pairs[(I, I)]:
            case = 2
            v = minus.n
            H = minus.add_edges([(x, v), (y, v)], minus.n + 1)
        else:
            case = 3
            n0 = minus.n
            # copy j keeps x and y, the other vertices are shifted
            def relabel(u, j):
                if u == x:
                    return 0
                if u == y:
                    return 1
                rest = [z for z in range(n0) if z not in (x, y)]
                return 2 + j * (n0 - 2) + rest.index(u)

            edges = [(relabel(a, j), relabel(b, j)) for j in range(3) for a, b in minus.edges()]
            H = build_graph(edges, 2 + 3 * (n0 - 2))
            v = 0
        if girth(H) < floor:
            raise AssertionError(f"case {case} lowered the girth")
        Hp, w = _pendant(H, v)
        gH = Gadget(H, "ForceI", {"v": v}, spec, floor, None, None, f"build_H case {case} edge {x}-{y}")
        gHp = Gadget(Hp, "ForceO", {"w": w, "v": v}, spec, floor, None, None, gH.provenance + " + pendant")
        certify_gadget(gH, spec, max(limit, H.n))
        certify_gadget(gHp, spec, max(limit, Hp.n))
        return HPair(gH, gHp, case, (x, y))
    raise NoRemovableEdge("no single edge removal leaves a satisfiable graph")


def minimize_witness(g: Graph, spec: PartitionSpec) -> Graph:
    """Remove edges (lexicographic scan) while the graph stays unsatisfiable,
    then drop isolated vertices."""
    if exact_solve(g, spec) is not None:
        raise WitnessSatisfiable("the witness has a valid colouring")
    edges = g.edges()
    changed = True
    while changed:
        changed = False
        for e in list(edges):
            trial = [f for f in edges if f != e]
            if exact_solve(build_graph(trial, g.n), spec) is None:
                edges = trial
                changed = True
    used = sorted({u for e in edges for u in e})
    return build_graph(edges, g.n).induced(used)


class APrime(NamedTuple):
    a_prime: Graph
    v3: int
    B: Gadget
    force_o: Gadget


def build_A_prime(
    witness: Graph,
    spec: PartitionSpec,
    degree_cap: int | None = None,
    limit: int = 200,
) -> APrime:
    """Degree-preserving forcing gadgets from an unsatisfiable witness.

    A 2-vertex ``w`` of the witness is replaced by the path ``v1 v2 v3 v4 v5``
    (``v1``, ``v5`` its neighbours).  Every colouring of the result puts
    ``v3`` in an O-component of exactly two vertices; two copies joined
    through a new 2-vertex force it into I.
    """
    if spec.family != "path" or spec.k != 3:
        raise PreconditionViolated("this construction is for (I, P_3)")
    if witness.n and witness.min_degree() < 2:
        raise PreconditionViolated("witness has a vertex of degree at most 1")
    if degree_cap is not None and witness.max_degree() > degree_cap:
        raise PreconditionViolated("witness exceeds the degree cap")
    if exact_solve(witness, spec) is not None:
        raise WitnessSatisfiable("the witness has a valid colouring")
    twos = [v for v in range(witness.n) if witness.degree(v) == 2]
    if not twos:
        raise PreconditionViolated("witness has no 2-vertex")
    w = twos[0]
    v1, v5 = witness.adjacency[w]
    rest, keep = witness.remove([w])
    idx = {old: new for new, old in enumerate(keep)}
    n0 = rest.n
    v2, v3, v4 = n0, n0 + 1, n0 + 2
    a1, a5 = idx[v1], idx[v5]
    ap = rest.add_edges([(a1, v2), (v2, v3), (v3, v4), (v4, a5)], n0 + 3)
    if exact_solve(ap, spec) is None:
        raise RoleViolated("the modified witness has no valid colouring")
    path = (a1, v2, v3, v4, a5)
    for pattern in itertools.product((I, O), repeat=5):
        sol = _query(ap, spec, dict(zip(path, pattern)))
        if sol is None:
            continue
        c1, c2, c3, c4, c5 = pattern
        pair = c3 is O and (
            (c2 is O and c1 is I and c4 is I) or (c4 is O and c5 is I and c2 is I)
        )
        if not pair:
            raise RoleViolated("v3 is not in an O-component of exactly two vertices", sol)
    m = ap.n
    edges = ap.edges() + [(a + m, b + m) for a, b in ap.edges()]
    v = 2 * m
    edges += [(v3, v), (v3 + m, v)]
    B = build_graph(edges, 2 * m + 1)
    floor = girth(witness)
    floor = 3 if floor == float("inf") else int(floor)
    gB = Gadget(B, "ForceI", {"v": v}, spec, floor, degree_cap, None, "two modified witnesses joined")
    Bp, pw = _pendant(B, v)
    gO = Gadget(Bp, "ForceO", {"w": pw, "v": v}, spec, floor, degree_cap, None, gB.provenance + " + pendant")
    certify_gadget(gB, spec, max(limit, B.n))
    certify_gadget(gO, spec, max(limit, Bp.n))
    return APrime(ap, v3, gB, gO)


# -- mining -------------------------------------------------------------------------


@dataclass(frozen=True)
class NotFound:
    """Search gave up.  This is not a proof that no such gadget exists."""

    role: str
    reason: str
    candidates_tried: int = 0


def _forced_vertex(g: Graph, spec: PartitionSpec, want: Color) -> int | None:
    if exact_solve(g, spec) is None:
        return None
    for v in range(g.n):
        if exact_solve(g, spec, fixed={v: want.other()}) is None:
            return v
    return None


def _fits(g: Graph, girth_floor: int, degree_cap: int | None) -> bool:
    if degree_cap is not None and g.max_degree() > degree_cap:
        return False
    return girth(g) >= girth_floor


def _atlas(max_n: int):
    import networkx as nx

    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if n < 2 or n > max_n or not nx.is_connected(h):
            continue
        yield build_graph(list(h.edges()), n)


def _random_connected(rng: random.Random, n: int, girth_floor: int, degree_cap) -> Graph | None:
    # random spanning tree plus a few chords that respect girth and degree limits
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    g = build_graph(edges, n)
    if degree_cap is not None and g.max_degree() > degree_cap:
        return None
    for _ in range(rng.randrange(n // 2, 2 * n)):
        u, v = rng.sample(range(n), 2)
        if g.has_edge(u, v):
            continue
        trial = g.add_edges([(u, v)])
        if _fits(trial, girth_floor, degree_cap):
            g = trial
    return g


def _mine_force_i(spec, girth_floor, degree_cap, max_n, budget, rng):
    tried = 0
    if max_n >= 2:
        for g in _atlas(min(max_n, 7)):
            if not _fits(g, girth_floor, degree_cap):
                continue
            tried += 1
            v = _forced_vertex(g, spec, I)
            if v is not None:
                return g, v, f"graph atlas, {g.n} vertices", tried
    for _ in range(budget):
        if max_n < 8:
            break
        n = rng.randint(8, max_n)
        g = _random_connected(rng, n, girth_floor, degree_cap)
        if g is None:
            continue
        tried += 1
        if exact_solve(g, spec) is None:
            try:
                pair = build_H(minimize_witness(g, spec), spec, limit=max(max_n, 3 * n + 1))
            except (NoRemovableEdge, RoleViolated, AssertionError):
                continue
            H = pair.H
            if H.graph.n <= max_n and _fits(H.graph, girth_floor, degree_cap):
                return H.graph, H.ports["v"], "random witness via build_H", tried
            continue
        v = _forced_vertex(g, spec, I)
        if v is not None:
            return g, v, f"random search, {n} vertices", tried
    return None, None, "", tried


def _attach_force_o(edges: list, n: int, fo: Gadget, target: int) -> int:
    """Append a copy of ``fo`` with its port w identified to ``target``."""
    w = fo.ports["w"]
    mapping = {}
    for u in range(fo.graph.n):
        if u == w:
            mapping[u] = target
        else:
            mapping[u] = n
            n += 1
    edges.extend((mapping[a], mapping[b]) for a, b in fo.graph.edges())
    return n


def _skeletons(spec: PartitionSpec, max_len: int):
    """Path skeletons s = p0 .. pL = e with optional O-anchors on inner vertices.

    Each inner vertex may itself be pinned O and may carry a pendant tail of
    pinned-O vertices.  Yields (edges, n, pinned) ordered by size.
    """
    options = [(pin, tail) for pin in (False, True) for tail in range(spec.k + 1)]
    found = []
    for L in range(2, max_len + 1):
        for choice in itertools.product(options, repeat=L - 1):
            edges = [(i, i + 1) for i in range(L)]
            n = L + 1
            pinned = []
            for i, (pin, tail) in enumerate(choice, start=1):
                if pin:
                    pinned.append(i)
                prev = i
                for _ in range(tail):
                    edges.append((prev, n))
                    pinned.append(n)
                    prev = n
                    n += 1
            found.append((n, L, edges, pinned))
    found.sort(key=lambda t: (t[0], t[1]))
    for n, L, edges, pinned in found:
        yield edges, n, L, pinned


def _mine_transmitter(spec, girth_floor, degree_cap, max_n, budget, rng, force_o):
    if max_n is not None and max_n <= 2:
        return None, "too few vertices for a transmitter", 0
    if force_o is None:
        fo = mine_gadget("ForceO", spec, girth_floor, degree_cap, 12, None, rng.randrange(2**31))
        if isinstance(fo, NotFound):
            return None, "no forcing gadget to anchor with", 0
    else:
        fo = force_o
    tried = 0
    for edges, n, L, pinned in _skeletons(spec, 6):
        if budget is not None and tried >= budget:
            break
        tried += 1
        g = build_graph(edges, n)
        pins = {p: O for p in pinned}
        facts = _transmitter_facts(g, spec, 0, L, fixed=pins)
        if facts["OI"] or not all(facts[f] for f in ("II", "OO", "OO_clean", "IO_clean")):
            continue
        full = list(edges)
        total = n
        for p in pinned:
            total = _attach_force_o(full, total, fo, p)
        real = build_graph(full, total)
        if max_n is not None and real.n > max_n:
            continue
        if not _fits(real, girth_floor, degree_cap):
            continue
        gadget = Gadget(
            real, "Transmitter", {"s": 0, "e": L}, spec, girth_floor, degree_cap, None,
            f"path skeleton of length {L} with {len(pinned)} anchors",
        )
        try:
            cert = certify_gadget(gadget, spec, limit=real.n)
        except RoleViolated:
            continue
        if cert.fact("OO_clean") and cert.fact("IO_clean"):
            return gadget, "", tried
    return None, "skeleton search exhausted", tried


def mine_gadget(
    role: str,
    spec: PartitionSpec,
    girth_floor: int = 3,
    degree_cap: int | None = None,
    max_n: int | None = 10,
    budget: int | None = None,
    seed: int = 0,
    force_o: Gadget | None = None,
):
    """Search for a certified gadget; returns a Gadget or NotFound.

    Forcing gadgets come from the graph atlas (up to 7 vertices) and then
    from random connected graphs.  Transmitters are path skeletons whose
    anchors are realised with copies of a ForceO gadget; ``max_n`` bounds the
    realised transmitter.
    """
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    rng = random.Random(seed)
    if role != "Transmitter" and budget is None:
        budget = 2000
    if role == "Transmitter":
        gadget, reason, tried = _mine_transmitter(
            spec, girth_floor, degree_cap, max_n, budget, rng, force_o
        )
        return gadget if gadget is not None else NotFound(role, reason, tried)
    cap_i = degree_cap - 1 if (role == "ForceO" and degree_cap is not None) else degree_cap
    limit_i = (max_n - 1 if role == "ForceO" else max_n) if max_n is not None else 14
    g, v, how, tried = _mine_force_i(spec, girth_floor, cap_i, limit_i, budget, rng)
    if g is None:
        return NotFound(role, "budget exhausted", tried)
    if role == "ForceI":
        gadget = Gadget(g, "ForceI", {"v": v}, spec, girth_floor, degree_cap, None, how)
    else:
        gp, w = _pendant(g, v)
        gadget = Gadget(gp, "ForceO", {"w": w, "v": v}, spec, girth_floor, degree_cap, None, how + " + pendant")
    certify_gadget(gadget, spec, limit=max(gadget.graph.n, DEFAULT_CERTIFY_LIMIT))
    return gadget


# -- the reduction ------------------------------------------------------------------


@dataclass
class TransmitterCopy:
    variable: int
    clause: int
    position: int
    s: int
    e: int
    vertices: tuple


@dataclass
class ReductionMap:
    graph: Graph
    variables: dict  # variable -> (positive end, negative middle, positive end)
    clauses: list  # per clause: literal vertices in clause order
    fillers: list  # per clause: vertices forced into O
    transmitters: list = field(default_factory=list)
    girth_floor: int = 3
    claimed_planar: bool | None = None

    def summary(self) -> dict:
        return {
            "n": self.graph.n,
            "m": self.graph.m,
            "variables": len(self.variables),
            "clauses": len(self.clauses),
            "transmitters": len(self.transmitters),
            "girth_floor": self.girth_floor,
            "claimed_planar": self.claimed_planar,
        }


def _pick(catalog: Iterable[Gadget], role: str, spec: PartitionSpec) -> Gadget:
    for gd in catalog:
        if gd.role == role and gd.spec == spec and gd.certificate is not None:
            return gd
    raise MissingGadget(f"catalog has no certified {role} gadget for {spec}")


def build_reduction(K: RestrictedCnf, catalog: Sequence[Gadget], spec: PartitionSpec) -> ReductionMap:
    if spec.k < 3:
        raise BadSpec("reductions are built only for k >= 3")
    if not K.clauses:
        raise BadSpec("the instance has no clauses")
    fo = _pick(catalog, "ForceO", spec)
    tr = _pick(catalog, "Transmitter", spec)
    edges: list = []
    n = 0
    variables = {}
    for var in range(1, K.variable_count + 1):
        a, m, b = n, n + 1, n + 2
        edges += [(a, m), (m, b)]
        variables[var] = (a, m, b)
        n += 3
    clauses, fillers = [], []
    for clause in K.clauses:
        path = list(range(n, n + spec.k + 1))
        n += spec.k + 1
        edges += list(zip(path, path[1:]))
        clauses.append(path[: len(clause)])
        fill = path[len(clause) :]
        fillers.append(fill)
        for f in fill:
            n = _attach_force_o(edges, n, fo, f)
    transmitters = []
    used_pos = {var: 0 for var in variables}
    for ci, clause in enumerate(K.clauses):
        for pos, lit in enumerate(clause):
            var = abs(lit)
            a, m, b = variables[var]
            if lit > 0:
                s = (a, b)[used_pos[var]]
                used_pos[var] += 1
            else:
                s = m
            e = clauses[ci][pos]
            mapping = {}
            for u in range(tr.graph.n):
                if u == tr.ports["s"]:
                    mapping[u] = s
                elif u == tr.ports["e"]:
                    mapping[u] = e
                else:
                    mapping[u] = n
                    n += 1
            edges += [(mapping[x], mapping[y]) for x, y in tr.graph.edges()]
            transmitters.append(
                TransmitterCopy(var, ci, pos, s, e, tuple(mapping[u] for u in range(tr.graph.n)))
            )
    J = build_graph(edges, n)
    floor = min(fo.girth_floor, tr.girth_floor)
    if girth(J) < floor:
        raise AssertionError(f"girth(J) = {girth(J)} is below the catalog floor {floor}")
    return ReductionMap(J, variables, clauses, fillers, transmitters, floor, K.claimed_planar)


def soundness_check(
    K: RestrictedCnf, J: ReductionMap | None, spec: PartitionSpec, limit: int | None = None
) -> bool:
    """True when K is satisfiable exactly when J has a valid partition."""
    if K.variable_count == 0 and J is None:
        return True
    if J is None:
        raise ValueError("a reduction graph is required for a non-empty instance")
    if limit is not None and J.graph.n > limit:
        raise TooLarge(f"J has {J.graph.n} vertices, limit is {limit}")
    sat = brute_force_sat(K) is not None
    return sat == (exact_solve(J.graph, spec) is not None)


def default_catalog(spec: PartitionSpec, seed: int = 0) -> list[Gadget]:
    """Mine a minimal certified catalog (ForceI, ForceO, Transmitter)."""
    fi = mine_gadget("ForceI", spec, seed=seed)
    fo = mine_gadget("ForceO", spec, seed=seed)
    if isinstance(fi, NotFound) or isinstance(fo, NotFound):
        raise MissingGadget("could not mine forcing gadgets")
    tr = mine_gadget("Transmitter", spec, max_n=None, seed=seed, force_o=fo)
    if isinstance(tr, NotFound):
        raise MissingGadget(f"could not mine a transmitter: {tr.reason}")
    return [fi, fo, tr]
