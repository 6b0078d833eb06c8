"""Exact maximum average degree via flow-based density tests.

Everything here is integer or ``Fraction`` arithmetic.  The density test is
Goldberg's construction: for a target ``a/b`` the network

    s -> v      capacity  m*b
    v -> t      capacity  m*b + 2a - b*d(v)
    u <-> v     capacity  b       (for every edge uv)

has minimum cut ``m*b*n + 2*min_S (a|S| - b|E(S)|)``, so some subgraph has
``|E(H)|/|H| > a/b`` exactly when the cut is below ``m*b*n``; the source side
of a minimum cut is such a subgraph.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .graph import Graph


class EmptyGraph(ValueError):
    pass


class TooLarge(ValueError):
    pass


BRUTEFORCE_LIMIT = 20


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, c: int, rc: int = 0) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(rc)

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                if self.cap[e] > 0 and level[self.to[e]] < 0:
                    level[self.to[e]] = level[u] + 1
                    queue.append(self.to[e])
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        to, cap, head = self.to, self.cap, self.head
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            it = [0] * self.n

            def push(u: int, f: int) -> int:
                if u == t:
                    return f
                while it[u] < len(head[u]):
                    e = head[u][it[u]]
                    v = to[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        got = push(v, min(f, cap[e]))
                        if got:
                            cap[e] -= got
                            cap[e ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                f = push(s, 1 << 62)
                if not f:
                    break
                total += f

    def source_side(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.head[u]:
                if self.cap[e] > 0 and self.to[e] not in seen:
                    seen.add(self.to[e])
                    stack.append(self.to[e])
        return seen


def denser_than(g: Graph, ratio: Fraction) -> set[int] | None:
    """A vertex set ``H`` with ``|E(H)|/|H| > ratio``, or ``None``."""
    ratio = Fraction(ratio)
    m = g.m
    if m == 0:
        return {0} if ratio < 0 and g.n else None
    if ratio < 0:
        return {0}
    a, b = ratio.numerator, ratio.denominator
    n = g.n
    s, t = n, n + 1
    net = _Dinic(n + 2)
    big = m * b
    for v in range(n):
        net.add_edge(s, v, big)
        net.add_edge(v, t, big + 2 * a - b * g.degree(v))
    for u, v in g.edges():
        net.add_edge(u, v, b, b)
    cut = net.max_flow(s, t)
    if cut >= big * n:
        return None
    side = net.source_side(s)
    side.discard(s)
    return side


def density(g: Graph, vertices) -> Fraction:
    vs = set(vertices)
    return Fraction(2 * g.induced_edge_count(vs), len(vs))


def mad_exact(g: Graph) -> tuple[Fraction, frozenset[int]]:
    """Maximum average degree and a subgraph attaining it.

    Binary search on ``|E(H)|/|H|``: two distinct values of that ratio with
    denominators at most ``n`` differ by at least ``1/(n(n-1))``, so once
    the bracket is narrower than that, the last witness found is optimal.
    """
    if g.n == 0:
        raise EmptyGraph("mad of the empty graph is undefined")
    if g.m == 0:
        return Fraction(0), frozenset({0})
    n = g.n
    gap = Fraction(1, n * (n - 1))
    lo, hi = Fraction(0), Fraction(g.m)
    witness = denser_than(g, lo)
    assert witness is not None
    while hi - lo >= gap:
        mid = (lo + hi) / 2
        found = denser_than(g, mid)
        if found is None:
            hi = mid
        else:
            lo, witness = mid, found
    return density(g, witness), frozenset(witness)


def mad_below(g: Graph, threshold: Fraction) -> bool:
    """``mad(g) < threshold`` decided by one density test.

    If ``mad < p/q`` then ``p/q - mad >= 1/(q*n)`` since ``mad`` has
    denominator at most ``n``; so ``mad >= p/q`` exactly when some subgraph
    is strictly denser than ``p/q - 1/(q*n)``.
    """
    threshold = Fraction(threshold)
    if g.n == 0:
        return True
    shifted = threshold - Fraction(1, threshold.denominator * g.n)
    if shifted >= 2:
        # a vertex of degree <= 1 never helps a subgraph of average degree >= 2
        core = two_core(g)
        if not core:
            return True
        g = g.induced(core)
    return denser_than(g, shifted / 2) is None


def two_core(g: Graph) -> list[int]:
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    stack = [v for v in range(g.n) if deg[v] <= 1]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in g.adjacency[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)
    return [v for v in range(g.n) if alive[v]]


def mad_bruteforce(g: Graph) -> Fraction:
    if g.n == 0:
        raise EmptyGraph("mad of the empty graph is undefined")
    if g.n > BRUTEFORCE_LIMIT:
        raise TooLarge(f"{g.n} vertices exceeds the brute-force limit {BRUTEFORCE_LIMIT}")
    nbr_mask = [0] * g.n
    for u, v in g.edges():
        nbr_mask[u] |= 1 << v
        nbr_mask[v] |= 1 << u
    best = Fraction(0)
    for mask in range(1, 1 << g.n):
        twice_edges = 0
        size = 0
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            twice_edges += bin(nbr_mask[v] & mask).count("1")
            size += 1
            rest ^= low
        value = Fraction(twice_edges, size)
        if value > best:
            best = value
    return best

