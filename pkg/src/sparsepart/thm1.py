"""Constructive (I, O_3)-partitions for graphs of maximum average degree < 5/2.

The solver peels reducible configurations off the graph, solves what is left
and extends the colouring back, one configuration at a time:

* ``Degree0or1``: a vertex of degree at most one.
* ``AllTwoNeighbors``: a vertex of degree 2 or 3 whose neighbours all have
  degree 2 (its closed neighbourhood is removed).
* ``ThreeVertexTwoSons`` / ``FourVertexFourSons``: a 3-vertex with two sons
  or a 4-vertex with four sons in the forest ``L`` (it is removed together
  with its descendants).

When none applies the residual graph is returned; the Rules 1-2 audit then
certifies ``2|E| >= 5|V|/2`` on it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .charges import ChargeLedger
from .graph import Graph, chains
from .partition import Color, I, O, PartitionSpec, Saturation, saturation, verify

O3 = PartitionSpec.order(3)


class PreconditionViolated(ValueError):
    pass


class ExtensionFailed(RuntimeError):
    pass


class ConfigKind(enum.Enum):
    DEGREE_0_OR_1 = "Degree0or1"
    ALL_TWO_NEIGHBORS = "AllTwoNeighbors"
    THREE_VERTEX_TWO_SONS = "ThreeVertexTwoSons"
    FOUR_VERTEX_FOUR_SONS = "FourVertexFourSons"


@dataclass(frozen=True)
class ReducibleConfig:
    kind: ConfigKind
    center: int
    support: frozenset


@dataclass(frozen=True)
class NotApplicable:
    """No configuration applies; ``residual`` is the irreducible graph and
    ``residual_ids[i]`` the input id of its vertex ``i``."""

    residual: Graph
    residual_ids: tuple


# -- forest L ----------------------------------------------------------------


@dataclass
class ForestL:
    father: dict[int, int] = field(default_factory=dict)
    sons: dict[int, list[int]] = field(default_factory=dict)
    leaves: set[int] = field(default_factory=set)
    members: set[int] = field(default_factory=set)
    edges: set[frozenset] = field(default_factory=set)

    def link(self, dad: int, son: int) -> None:
        if son in self.father and self.father[son] != dad:
            raise PreconditionViolated(f"vertex {son} would get a second father")
        self.father[son] = dad
        self.sons.setdefault(dad, [])
        if son not in self.sons[dad]:
            self.sons[dad].append(son)
            self.sons[dad].sort()
        self.members.update((dad, son))
        self.edges.add(frozenset((dad, son)))

    def sons_of(self, v: int) -> list[int]:
        return self.sons.get(v, [])

    def descendants(self, v: int) -> set[int]:
        out: set[int] = set()
        stack = list(self.sons_of(v))
        while stack:
            x = stack.pop()
            if x not in out:
                out.add(x)
                stack.extend(self.sons_of(x))
        return out

    def check(self, g: Graph) -> None:
        """Raise if a structural invariant of the forest fails."""
        for son, dad in self.father.items():
            if not g.has_edge(son, dad):
                raise AssertionError(f"father link {dad}->{son} is not an edge")
            if (g.degree(dad) >= 3) == (g.degree(son) >= 3):
                raise AssertionError(f"father link {dad}->{son} does not alternate degrees")
        for son in self.father:
            seen = {son}
            x = son
            while x in self.father:
                x = self.father[x]
                if x in seen:
                    raise AssertionError(f"father relation has a cycle through {son}")
                seen.add(x)


def build_forest_L(g: Graph) -> ForestL:
    """Forest over 2-chains, grown until it stops changing."""
    if any(g.degree(v) <= 1 for v in range(g.n)) or _all_two_center(g) is not None:
        raise PreconditionViolated("reduce degree <= 1 and all-2-neighbour vertices first")
    L = ForestL()
    found, cycles = chains(g)
    if cycles:
        raise PreconditionViolated("graph has a cycle of 2-vertices")
    for ch in found:
        if ch.length >= 3:
            raise PreconditionViolated("graph has a chain with three internal vertices")
        if ch.length == 2:
            (v1, v2), (u1, u2) = ch.internal, ch.endpoints
            L.link(u1, v1)
            L.link(u2, v2)
            L.leaves.update((v1, v2))
    grown = True
    while grown:
        grown = False
        for w in range(g.n):
            nsons = len(L.sons_of(w))
            if not ((g.degree(w) == 4 and nsons >= 3) or (g.degree(w) == 3 and nsons >= 1)):
                continue
            for v in g.adjacency[w]:
                if g.degree(v) != 2 or v in L.members:
                    continue
                u = g.adjacency[v][0] if g.adjacency[v][1] == w else g.adjacency[v][1]
                L.link(u, v)
                L.link(v, w)
                grown = True
                L.check(g)
                break
    return L


# -- configurations ---------------------------------------------------------


def _all_two_center(g: Graph) -> int | None:
    for v in range(g.n):
        if 2 <= g.degree(v) <= 3 and all(g.degree(w) == 2 for w in g.adjacency[v]):
            return v
    return None


def _deepest(L: ForestL, centers: list[int]) -> int | None:
    pool = set(centers)
    for v in sorted(centers):
        if not (L.descendants(v) & pool):
            return v
    return None


def find_reducible(g: Graph, L: ForestL | None = None) -> ReducibleConfig | None:
    for v in range(g.n):
        if g.degree(v) <= 1:
            return ReducibleConfig(ConfigKind.DEGREE_0_OR_1, v, frozenset({v}))
    v = _all_two_center(g)
    if v is not None:
        return ReducibleConfig(
            ConfigKind.ALL_TWO_NEIGHBORS, v, frozenset({v, *g.adjacency[v]})
        )
    if L is None:
        L = build_forest_L(g)
    for kind, deg, need in (
        (ConfigKind.THREE_VERTEX_TWO_SONS, 3, 2),
        (ConfigKind.FOUR_VERTEX_FOUR_SONS, 4, 4),
    ):
        centers = [x for x in range(g.n) if g.degree(x) == deg and len(L.sons_of(x)) >= need]
        v = _deepest(L, centers)
        if v is not None:
            return ReducibleConfig(kind, v, frozenset({v} | L.descendants(v)))
    return None


# -- extensions -------------------------------------------------------------


def _other(g: Graph, x: int, not_this: int) -> int:
    a, b = g.adjacency[x]
    return b if a == not_this else a


class _TreeColorer:
    """Colours a set of L-vertices bottom-up following the recolouring lemma.

    Works on a colouring in which every vertex outside ``region`` is set
    (except possibly the father of the top vertex).  3+-vertices are handled
    children first; a 3-vertex's third neighbour is handled before it when
    it lies in the region and is not an ancestor.
    """

    def __init__(self, g: Graph, L: ForestL, c: list, region: set[int], check: bool):
        self.g, self.L, self.c, self.region, self.check = g, L, c, region, check

    def order(self, top: int) -> list[int]:
        out: list[int] = []
        done: set[int] = set()
        active: set[int] = set()
        stack = [(top, False)]
        while stack:
            x, expanded = stack.pop()
            if expanded:
                active.discard(x)
                done.add(x)
                out.append(x)
                continue
            if x in done or x in active:
                continue
            active.add(x)
            stack.append((x, True))
            nxt = []
            for s in self.L.sons_of(x):
                if s not in self.L.leaves:
                    nxt.extend(self.L.sons_of(s))
            third = self._third(x)
            if third is not None and third in self.region:
                nxt.append(third)
            for y in sorted(nxt, reverse=True):
                if y not in done and y not in active and self.g.degree(y) >= 3:
                    stack.append((y, False))
        return out

    def _third(self, x: int) -> int | None:
        if self.g.degree(x) != 3:
            return None
        known = set(self.L.sons_of(x))
        if x in self.L.father:
            known.add(self.L.father[x])
        rest = [w for w in self.g.adjacency[x] if w not in known]
        return rest[0] if len(rest) == 1 else None

    def _tidy_partner(self, s: int, p: int) -> None:
        # a leaf's partner p that is O next to another O is recoloured I;
        # p's other neighbours are O or unset so this is always safe
        c, g = self.c, self.g
        if s in self.L.leaves and c[p] is O:
            q = _other(g, p, s)
            if c[q] is O:
                c[p] = I

    def color_vertex(self, x: int) -> None:
        g, c = self.g, self.c
        sons = self.L.sons_of(x)
        partners = {s: _other(g, s, x) for s in sons}
        for s in sons:
            self._tidy_partner(s, partners[s])
        if len(sons) >= 3 or g.degree(x) == 4:
            third_o = True
        else:
            third = self._third(x)
            third_o = third is None or c[third] is not I
        if third_o:
            for s in sons:
                c[s] = O
            c[x] = I
        else:
            for s in sons:
                c[s] = I if c[partners[s]] is not I else O
            c[x] = O
        # only a vertex with a father has to stay unsaturated
        if self.check and c[x] is O and x in self.L.father:
            if saturation(g, c, x, O3) is Saturation.SATURATED:
                raise ExtensionFailed(f"vertex {x} ended saturated")

    def run(self, top: int) -> None:
        for x in self.order(top):
            self.color_vertex(x)
        left = [v for v in self.region if self.c[v] is None]
        if left:
            raise ExtensionFailed(f"vertices {sorted(left)} left uncoloured")


def recolor_unsaturated(
    g: Graph, L: ForestL, v: int, c: Sequence[Optional[Color]], check: bool = True
) -> list:
    """Colour ``v`` and its descendants so that ``v`` is not saturated if O.

    ``c`` must leave exactly ``v``, its descendants and its father unset.
    """
    if g.degree(v) < 3 or v not in L.father:
        raise PreconditionViolated(f"vertex {v} is not a 3+-vertex of L with a father")
    region = L.descendants(v) | {v}
    out = list(c)
    _TreeColorer(g, L, out, region, check).run(v)
    return out


def _extend(g: Graph, cfg: ReducibleConfig, c: list, L: ForestL | None, check: bool) -> None:
    v = cfg.center
    if cfg.kind is ConfigKind.DEGREE_0_OR_1:
        nbrs = g.adjacency[v]
        c[v] = I if not nbrs else c[nbrs[0]].other()
    elif cfg.kind is ConfigKind.ALL_TWO_NEIGHBORS:
        for u in g.adjacency[v]:
            outer = _other(g, u, v)
            if outer not in cfg.support:
                c[u] = c[outer].other()
        for u in cfg.support:
            if c[u] is None:
                c[u] = O
        if not _locally_valid(g, c, cfg.support):
            c[v] = I
    else:
        _TreeColorer(g, L, c, set(cfg.support), check).run(v)
    if not _locally_valid(g, c, cfg.support):
        raise ExtensionFailed(f"{cfg.kind.value} at {v} produced an invalid colouring")


def _locally_valid(g: Graph, c: Sequence, touched) -> bool:
    near = set(touched)
    for x in touched:
        near.update(g.adjacency[x])
    for x in near:
        if c[x] is I and any(c[w] is I for w in g.adjacency[x]):
            return False
    seen: set[int] = set()
    for x in near:
        if c[x] is not O or x in seen:
            continue
        comp = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for w in g.adjacency[y]:
                if c[w] is O:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
                        if len(comp) > 3:
                            return False
        seen |= comp
    return True


# -- driver -------------------------------------------------------------------


@dataclass
class Thm1Trace:
    steps: list = field(default_factory=list)  # (kind, center in input ids, |support|)


def solve_io3(g: Graph, check: bool = True, trace: Thm1Trace | None = None):
    """A verified (I, O_3) colouring of ``g``, or :class:`NotApplicable`."""
    frames = []
    cur, ids = g, list(range(g.n))
    while cur.n:
        L = None
        cfg = find_reducible(cur)
        if cfg is not None and cfg.kind in (
            ConfigKind.THREE_VERTEX_TWO_SONS,
            ConfigKind.FOUR_VERTEX_FOUR_SONS,
        ):
            L = build_forest_L(cur)
        if cfg is None:
            return NotApplicable(cur, tuple(ids))
        if trace is not None:
            trace.steps.append((cfg.kind.value, ids[cfg.center], len(cfg.support)))
        nxt, keep = cur.remove(cfg.support)
        frames.append((cur, cfg, keep, L))
        cur, ids = nxt, [ids[k] for k in keep]
    coloring: list = []
    for parent, cfg, keep, L in reversed(frames):
        full: list = [None] * parent.n
        for new, old in enumerate(keep):
            full[old] = coloring[new]
        _extend(parent, cfg, full, L, check)
        coloring = full
    if verify(g, coloring, O3) is not None:
        raise ExtensionFailed(str(verify(g, coloring, O3)))
    return coloring


# -- discharging audit ------------------------------------------------------


def audit_charges_thm1(g: Graph, L: ForestL | None = None) -> ChargeLedger:
    """Initial charge d - 5/2; Rule 1 sends 1/2 from a 3+-vertex of L to each
    son, Rule 2 sends 1/4 from a 3+-vertex to each 2-neighbour it is not
    joined to in L."""
    if find_reducible(g, L) is not None:
        raise PreconditionViolated("graph still has a reducible configuration")
    if L is None:
        L = build_forest_L(g)
    ledger = ChargeLedger({v: g.degree(v) - Fraction(5, 2) for v in range(g.n)})
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    for v in range(g.n):
        if g.degree(v) < 3:
            continue
        for s in L.sons_of(v):
            ledger.give(v, s, half, "rule1")
        for w in g.adjacency[v]:
            if g.degree(w) == 2 and frozenset((v, w)) not in L.edges:
                ledger.give(v, w, quarter, "rule2")
    return ledger
