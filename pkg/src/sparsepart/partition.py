"""(I, O_k) and (I, P_k) partitions: specs, verification and exact search."""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .graph import Graph, components, degeneracy_order


class Color(str, enum.Enum):
    I = "I"
    O = "O"

    def other(self) -> "Color":
        return Color.O if self is Color.I else Color.I


I, O = Color.I, Color.O

# A colouring is a list indexed by vertex; ``None`` marks an unset vertex.
Coloring = list


@dataclass(frozen=True)
class PartitionSpec:
    family: str  # "order" (O_k) or "path" (P_k)
    k: int

    def __post_init__(self):
        if self.family not in ("order", "path"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")

    @classmethod
    def order(cls, k: int) -> "PartitionSpec":
        return cls("order", k)

    @classmethod
    def path(cls, k: int) -> "PartitionSpec":
        return cls("path", k)

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> "PartitionSpec":
        """``o3``, ``P5`` or a bare family (``ok``/``pk``) plus ``k``."""
        text = text.strip().lower()
        family = {"o": "order", "p": "path"}.get(text[:1])
        if family is None:
            raise ValueError(f"bad partition spec {text!r}")
        rest = text[1:]
        if rest in ("", "k"):
            if k is None:
                raise ValueError(f"spec {text!r} needs an explicit k")
            return cls(family, k)
        return cls(family, int(rest))

    @property
    def paths_only(self) -> bool:
        return self.family == "path"

    def __str__(self) -> str:
        return f"{'O' if self.family == 'order' else 'P'}{self.k}"


class ViolationKind(enum.Enum):
    ADJACENT_I_PAIR = "AdjacentIPair"
    OVERSIZE_COMPONENT = "OversizeComponent"
    NON_PATH_COMPONENT = "NonPathComponent"
    UNSET_VERTEX = "UnsetVertex"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: frozenset

    def __str__(self) -> str:
        return f"{self.kind.value} {sorted(self.witness)}"


def o_components(g: Graph, c: Sequence[Optional[Color]]) -> list[set[int]]:
    return components(g, [v for v in range(g.n) if c[v] is O])


def verify(g: Graph, c: Sequence[Optional[Color]], spec: PartitionSpec) -> Violation | None:
    """``None`` when ``c`` is a valid total colouring, else the first violation."""
    if len(c) != g.n:
        raise ValueError(f"colouring has {len(c)} entries for {g.n} vertices")
    unset = frozenset(v for v in range(g.n) if c[v] is None)
    if unset:
        return Violation(ViolationKind.UNSET_VERTEX, unset)
    for u, v in g.edges():
        if c[u] is I and c[v] is I:
            return Violation(ViolationKind.ADJACENT_I_PAIR, frozenset((u, v)))
    for comp in o_components(g, c):
        if len(comp) > spec.k:
            return Violation(ViolationKind.OVERSIZE_COMPONENT, frozenset(comp))
        if spec.paths_only and not _is_path(g, comp):
            return Violation(ViolationKind.NON_PATH_COMPONENT, frozenset(comp))
    return None


def _is_path(g: Graph, comp: set[int]) -> bool:
    degs = [sum(1 for w in g.adjacency[v] if w in comp) for v in comp]
    return max(degs) <= 2 and sum(degs) == 2 * (len(comp) - 1)


def is_valid(g: Graph, c: Sequence[Optional[Color]], spec: PartitionSpec) -> bool:
    return verify(g, c, spec) is None


# -- saturation ---------------------------------------------------------------


class Saturation(enum.Enum):
    SATURATED = "Saturated"
    UNSATURATED = "Unsaturated"
    INTERMEDIATE = "Intermediate"


class NotColoredO(ValueError):
    pass


def saturation(g: Graph, c: Sequence[Optional[Color]], v: int, spec: PartitionSpec) -> Saturation:
    """Classify an O-vertex.

    For ``O_3`` the local form is used: two O-neighbours, or an O-neighbour
    that itself has two O-neighbours.  Otherwise an O-vertex is saturated
    when its O-component has exactly ``k`` vertices.
    """
    if c[v] is not O:
        raise NotColoredO(f"vertex {v} is not coloured O")
    o_nbrs = [w for w in g.adjacency[v] if c[w] is O]
    if not o_nbrs:
        return Saturation.UNSATURATED
    if spec.family == "order" and spec.k == 3:
        if len(o_nbrs) >= 2 or any(
            sum(1 for x in g.adjacency[w] if c[x] is O) >= 2 for w in o_nbrs
        ):
            return Saturation.SATURATED
        return Saturation.INTERMEDIATE
    comp = next(comp for comp in o_components(g, c) if v in comp)
    return Saturation.SATURATED if len(comp) == spec.k else Saturation.INTERMEDIATE


# -- exact search -------------------------------------------------------------


class SearchBudgetExceeded(RuntimeError):
    pass


class _Search:
    """Backtracking state: colours, an undoable union-find over O-vertices
    (component sizes) and per-vertex O-degree for the path family."""

    def __init__(self, g: Graph, spec: PartitionSpec, max_nodes: int | None):
        self.g = g
        self.k = spec.k
        self.paths = spec.paths_only
        self.color: list[Optional[Color]] = [None] * g.n
        self.parent = list(range(g.n))
        self.size = [1] * g.n
        self.odeg = [0] * g.n
        self.trail: list[tuple] = []
        self.nodes = 0
        self.max_nodes = max_nodes
        order = degeneracy_order(g)
        # static tie-break: high degree first, then late in the degeneracy order
        rank = {v: i for i, v in enumerate(order)}
        self.static = {v: (-g.degree(v), -rank[v]) for v in range(g.n)}

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            v = self.parent[v]
        return v

    def can(self, v: int, col: Color) -> bool:
        adj = self.g.adjacency[v]
        if col is I:
            return all(self.color[w] is not I for w in adj)
        roots = set()
        total = 1
        o_nbrs = 0
        for w in adj:
            if self.color[w] is O:
                o_nbrs += 1
                r = self.find(w)
                if r in roots:
                    if self.paths:
                        return False
                    continue
                if self.paths and self.odeg[w] >= 2:
                    return False
                roots.add(r)
                total += self.size[r]
        if self.paths and o_nbrs > 2:
            return False
        return total <= self.k

    def assign(self, v: int, col: Color) -> None:
        self.color[v] = col
        self.trail.append(("c", v))
        if col is O:
            for w in self.g.adjacency[v]:
                if self.color[w] is O:
                    self.odeg[w] += 1
                    self.odeg[v] += 1
                    self.trail.append(("d", v, w))
                    a, b = self.find(v), self.find(w)
                    if a != b:
                        if self.size[a] < self.size[b]:
                            a, b = b, a
                        self.parent[b] = a
                        self.size[a] += self.size[b]
                        self.trail.append(("u", a, b))

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry[0] == "c":
                self.color[entry[1]] = None
            elif entry[0] == "d":
                self.odeg[entry[1]] -= 1
                self.odeg[entry[2]] -= 1
            else:
                _, a, b = entry
                self.parent[b] = b
                self.size[a] -= self.size[b]

    def options(self, v: int) -> list[Color]:
        return [col for col in (I, O) if self.can(v, col)]

    def propagate(self, group: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for v in group:
                if self.color[v] is not None:
                    continue
                opts = self.options(v)
                if not opts:
                    return False
                if len(opts) == 1:
                    self.assign(v, opts[0])
                    changed = True
        return True

    def groups(self, vertices: Iterable[int]) -> list[list[int]]:
        """Split uncoloured vertices into groups that cannot interact: two
        vertices interact when adjacent or both adjacent to one O-component."""
        free = [v for v in vertices if self.color[v] is None]
        link: dict = {}

        def root(x):
            while link.get(x, x) != x:
                x = link[x]
            return x

        def join(x, y):
            rx, ry = root(x), root(y)
            if rx != ry:
                link[rx] = ry

        freeset = set(free)
        for v in free:
            for w in self.g.adjacency[v]:
                if w in freeset:
                    join(v, w)
                elif self.color[w] is O:
                    join(v, ("o", self.find(w)))
        buckets: dict = {}
        for v in free:
            buckets.setdefault(root(v), []).append(v)
        return list(buckets.values())

    def solve(self, group: list[int]) -> bool:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise SearchBudgetExceeded(f"more than {self.max_nodes} search nodes")
        mark = len(self.trail)
        if not self.propagate(group):
            self.undo(mark)
            return False
        parts = self.groups(group)
        if not parts:
            return True
        if len(parts) > 1:
            for part in sorted(parts, key=len):
                if not self.solve(part):
                    self.undo(mark)
                    return False
            return True
        part = parts[0]
        v = min(part, key=self._branch_key)
        for col in (I, O):
            if not self.can(v, col):
                continue
            inner = len(self.trail)
            self.assign(v, col)
            if self.solve(part):
                return True
            self.undo(inner)
        self.undo(mark)
        return False

    def _branch_key(self, v: int):
        coloured = sum(1 for w in self.g.adjacency[v] if self.color[w] is not None)
        return (-coloured, self.static[v], v)


def exact_solve(
    g: Graph,
    spec: PartitionSpec,
    fixed: Mapping[int, Color] | None = None,
    max_nodes: int | None = None,
) -> Coloring | None:
    """A valid colouring, or ``None`` when none exists (proved by exhaustion).

    ``fixed`` pins some vertices to a colour first.  The search tries I before
    O, branches on the vertex with most coloured neighbours (ties: high
    degree, then degeneracy order), assigns forced vertices by unit
    propagation and solves independent parts of the residual separately.
    """
    search = _Search(g, spec, max_nodes)
    for v, col in sorted((fixed or {}).items()):
        col = Color(col)
        if search.color[v] is not None:
            if search.color[v] is not col:
                return None
            continue
        if not search.can(v, col):
            return None
        search.assign(v, col)
    limit = sys.getrecursionlimit()
    if limit < 4 * g.n + 1000:
        sys.setrecursionlimit(4 * g.n + 1000)
    if not search.solve(list(range(g.n))):
        return None
    result = list(search.color)
    assert verify(g, result, spec) is None
    return result


def feasible_colors(g: Graph, v: int, spec: PartitionSpec) -> frozenset[Color]:
    """Colours that ``v`` takes over all valid colourings."""
    return frozenset(col for col in (I, O) if exact_solve(g, spec, fixed={v: col}) is not None)


# -- exhaustive oracle ---------------------------------------------------------


def brute_force_colorings(
    g: Graph, spec: PartitionSpec, fixed: Mapping[int, Color] | None = None
) -> Iterator[Coloring]:
    """Every valid colouring, by enumerating all candidate I-sets.

    Subsets whose I-part is not independent are skipped during generation;
    every remaining subset is checked with :func:`verify`.
    """
    fixed = dict(fixed or {})
    order = list(range(g.n))
    chosen: list[Optional[Color]] = [None] * g.n

    def rec(i: int) -> Iterator[Coloring]:
        if i == g.n:
            if verify(g, chosen, spec) is None:
                yield list(chosen)
            return
        v = order[i]
        for col in (I, O):
            if v in fixed and fixed[v] is not col:
                continue
            if col is I and any(chosen[w] is I for w in g.adjacency[v]):
                continue
            chosen[v] = col
            yield from rec(i + 1)
            chosen[v] = None

    yield from rec(0)


def brute_force_satisfiable(g: Graph, spec: PartitionSpec, fixed=None) -> bool:
    return next(brute_force_colorings(g, spec, fixed), None) is not None


# -- text format ---------------------------------------------------------------


class ColoringFormatError(ValueError):
    pass


def format_coloring(c: Sequence[Optional[Color]]) -> str:
    return "".join(f"{v} {'-' if col is None else col.value}\n" for v, col in enumerate(c))


def parse_coloring(text: str, n: int | None = None) -> Coloring:
    entries: dict[int, Optional[Color]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ColoringFormatError(f"line {lineno}: expected '<id> I|O'")
        try:
            v = int(parts[0])
        except ValueError:
            raise ColoringFormatError(f"line {lineno}: bad vertex id {parts[0]!r}") from None
        if parts[1] not in ("I", "O", "-"):
            raise ColoringFormatError(f"line {lineno}: colour must be I or O")
        if v in entries:
            raise ColoringFormatError(f"line {lineno}: vertex {v} listed twice")
        entries[v] = None if parts[1] == "-" else Color(parts[1])
    size = n if n is not None else (max(entries) + 1 if entries else 0)
    if any(v < 0 or v >= size for v in entries):
        raise ColoringFormatError("vertex id out of range")
    return [entries.get(v) for v in range(size)]
