"""Undirected simple graphs, structural queries and corpus generators."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

INFINITE = float("inf")


class GraphError(ValueError):
    pass


class LoopEdge(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class IdOutOfRange(GraphError):
    pass


class EdgeListFormatError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``adjacency[v]`` is a sorted tuple of neighbours.  ``metadata`` carries
    claims read from input files (``claimed_planar``, ``claimed_girth``);
    no algorithm relies on them.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjsets[u]

    @property
    def _adjsets(self) -> tuple[frozenset, ...]:
        sets = self.__dict__.get("_adjsets_cache")
        if sets is None:
            sets = tuple(frozenset(a) for a in self.adjacency)
            object.__setattr__(self, "_adjsets_cache", sets)
        return sets

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self.adjacency), default=0)

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        vs = set(vertices)
        return sum(1 for u in vs for w in self.adjacency[u] if w in vs and u < w)

    def remove(self, removed: Iterable[int]) -> tuple["Graph", list[int]]:
        """Return ``G - S`` and the list mapping new ids to old ids."""
        gone = set(removed)
        keep = [v for v in range(self.n) if v not in gone]
        return self.induced(keep), keep

    def induced(self, keep: Sequence[int]) -> "Graph":
        """``G[W]`` with vertices renumbered in the order of ``keep``."""
        index = {v: i for i, v in enumerate(keep)}
        adj = []
        for v in keep:
            adj.append(tuple(sorted(index[w] for w in self.adjacency[v] if w in index)))
        return Graph(len(keep), tuple(adj))

    def add_edges(self, extra: Iterable[tuple[int, int]], n: int | None = None) -> "Graph":
        return build_graph(self.edges() + list(extra), self.n if n is None else n)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(edges: Iterable[tuple[int, int]], n: int, metadata: dict | None = None) -> Graph:
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise IdOutOfRange(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u == v:
            raise LoopEdge(f"loop at vertex {u}")
        if v in adj[u]:
            raise DuplicateEdge(f"edge ({u}, {v}) given twice")
        adj[u].add(v)
        adj[v].add(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), dict(metadata or {}))


# -- structural queries -----------------------------------------------------


def girth(g: Graph) -> float | int:
    """Length of a shortest cycle, ``INFINITE`` for forests.

    BFS from every vertex; a non-tree edge ``uw`` closes a cycle of length
    at most ``dist[u] + dist[w] + 1`` and the minimum over all roots is exact.
    """
    best = INFINITE
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w in g.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


@dataclass(frozen=True)
class Chain:
    internal: tuple[int, ...]
    endpoints: tuple[int, int]

    @property
    def length(self) -> int:
        return len(self.internal)


def chains(g: Graph) -> tuple[list[Chain], list[tuple[int, ...]]]:
    """Maximal paths of 2-vertices between 3+-vertices.

    Returns ``(chains, cycles)``; the second list holds components that are
    bare cycles of 2-vertices (they have no 3+ end).  Degree-1 vertices
    stop a walk, so paths hanging off a leaf are not chains.
    """
    seen: set[int] = set()
    found: list[Chain] = []
    bare_cycles: list[tuple[int, ...]] = []
    for start in range(g.n):
        if g.degree(start) != 2 or start in seen:
            continue
        walks = []
        closed = False
        for first in g.adjacency[start]:
            path = []
            prev, cur = start, first
            while g.degree(cur) == 2 and cur != start:
                path.append(cur)
                nxt = g.adjacency[cur][0] if g.adjacency[cur][0] != prev else g.adjacency[cur][1]
                prev, cur = cur, nxt
            if cur == start:
                closed = True
                break
            walks.append((path, cur))
        if closed:
            cyc = [start]
            prev, cur = start, g.adjacency[start][0]
            while cur != start:
                cyc.append(cur)
                nxt = g.adjacency[cur][0] if g.adjacency[cur][0] != prev else g.adjacency[cur][1]
                prev, cur = cur, nxt
            seen.update(cyc)
            bare_cycles.append(tuple(cyc))
            continue
        (left, a), (right, b) = walks
        internal = list(reversed(left)) + [start] + right
        seen.update(internal)
        if g.degree(a) >= 3 and g.degree(b) >= 3:
            found.append(Chain(tuple(internal), (a, b)))
    return found, bare_cycles


def components(g: Graph, subset: Iterable[int] | None = None) -> list[set[int]]:
    """Connected components of ``G[subset]`` (whole graph when omitted)."""
    allowed = set(range(g.n)) if subset is None else set(subset)
    out: list[set[int]] = []
    seen: set[int] = set()
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        out.append(comp)
    return out


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def degeneracy_order(g: Graph) -> list[int]:
    """Repeatedly strip a minimum-degree vertex (smallest id on ties)."""
    deg = [g.degree(v) for v in range(g.n)]
    alive = set(range(g.n))
    order = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        order.append(v)
        alive.discard(v)
        for w in g.adjacency[v]:
            if w in alive:
                deg[w] -= 1
    return order


# -- constructions ----------------------------------------------------------


def subdivide(g: Graph, t: int) -> Graph:
    """Replace every edge by a path with ``t`` new internal vertices."""
    if t < 0:
        raise ValueError("t must be non-negative")
    edges = []
    n = g.n
    for u, v in g.edges():
        prev = u
        for _ in range(t):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, v))
    meta = dict(g.metadata)
    if isinstance(meta.get("claimed_girth"), int):
        meta["claimed_girth"] *= t + 1
    return build_graph(edges, n, meta)


def disjoint_union(*graphs: Graph) -> tuple[Graph, list[int]]:
    """Union of graphs; returns the graph and each part's id offset."""
    edges, offsets, n = [], [], 0
    for h in graphs:
        offsets.append(n)
        edges.extend((u + n, v + n) for u, v in h.edges())
        n += h.n
    return build_graph(edges, n), offsets


def complete_graph(n: int) -> Graph:
    return build_graph([(u, v) for u in range(n) for v in range(u + 1, n)], n)


def cycle_graph(n: int) -> Graph:
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def star_graph(leaves: int) -> Graph:
    return build_graph([(0, i) for i in range(1, leaves + 1)], leaves + 1)


def empty_graph(n: int) -> Graph:
    return build_graph([], n)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(outer + spokes + inner, 10)


def grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(edges, rows * cols, {"claimed_planar": True})


def wheel_graph(spokes: int) -> Graph:
    rim = [(1 + i, 1 + (i + 1) % spokes) for i in range(spokes)]
    return build_graph(rim + [(0, 1 + i) for i in range(spokes)], spokes + 1, {"claimed_planar": True})


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return build_graph([(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p], n)


def gen_sparse(n: int, mad_cap: Fraction, seed: int, attempts: int | None = None) -> Graph:
    """Connected random graph with ``mad < mad_cap``.

    Starts from a random spanning tree, then proposes edges and keeps those
    that keep the exact maximum average degree below the cap.  Half of the
    proposals join two minimum-degree vertices so that leafless graphs with
    long 2-vertex chains are common.
    """
    from .mad import mad_below, two_core

    mad_cap = Fraction(mad_cap)
    if mad_cap <= 0:
        raise ValueError("mad_cap must be positive")
    rng = random.Random(seed)
    if n <= 1:
        return empty_graph(max(n, 0))
    order = list(range(n))
    rng.shuffle(order)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        adj[u].add(v)
        adj[v].add(u)
    current = _from_sets(adj)
    if not mad_below(current, mad_cap):
        return current
    budget = attempts if attempts is not None else 4 * n
    core_key = _core_key(current, two_core)
    for _ in range(budget):
        if rng.random() < 0.5:
            low = min(len(a) for a in adj)
            pool = [v for v in range(n) if len(adj[v]) <= low + 1]
            if len(pool) < 2:
                continue
            u, v = rng.sample(pool, 2)
        else:
            u, v = rng.sample(range(n), 2)
        if v in adj[u]:
            continue
        adj[u].add(v)
        adj[v].add(u)
        candidate = _from_sets(adj)
        key = _core_key(candidate, two_core)
        # an edge outside the 2-core cannot raise mad above 2
        if (key == core_key and mad_cap > 2) or mad_below(candidate, mad_cap):
            current, core_key = candidate, key
        else:
            adj[u].discard(v)
            adj[v].discard(u)
    return current


def _core_key(g: Graph, two_core) -> tuple:
    core = two_core(g)
    return tuple(core), g.induced_edge_count(core)


def _from_sets(adj: list[set[int]]) -> Graph:
    return Graph(len(adj), tuple(tuple(sorted(a)) for a in adj))


# -- edge-list text format --------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """Parse ``p <n> <m>`` / ``e <u> <v>`` text with ``c`` comments."""
    n = m = None
    edges = []
    meta: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "c":
            for token in parts[1:]:
                if token.startswith("girth="):
                    meta["claimed_girth"] = int(token.split("=", 1)[1])
                elif token.startswith("planar="):
                    meta["claimed_planar"] = token.split("=", 1)[1] == "1"
        elif tag == "p":
            if len(parts) != 3 or n is not None:
                raise EdgeListFormatError(f"line {lineno}: bad header")
            n, m = int(parts[1]), int(parts[2])
        elif tag == "e":
            if n is None or len(parts) != 3:
                raise EdgeListFormatError(f"line {lineno}: edge before header or malformed")
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise EdgeListFormatError(f"line {lineno}: unknown record {tag!r}")
    if n is None:
        raise EdgeListFormatError("missing 'p <n> <m>' header")
    if m != len(edges):
        raise EdgeListFormatError(f"header announces {m} edges, found {len(edges)}")
    return build_graph(edges, n, meta)


def format_edge_list(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    if g.metadata.get("claimed_girth") is not None:
        lines.append(f"c girth={g.metadata['claimed_girth']}")
    if g.metadata.get("claimed_planar"):
        lines.append("c planar=1")
    lines.append(f"p {g.n} {g.m}")
    lines.extend(f"e {u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
