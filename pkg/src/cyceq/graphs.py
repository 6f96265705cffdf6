"""Finite simple graphs, pattern-coloured graphs, and cycle machinery.

A coloured graph is a host graph together with a homomorphism sigma into
a pattern graph F (vertices of F are 0-indexed and double as colours).
For K3-coloured graphs the module provides the wrap of a walk and the
level-map test against the cyclically 3-coloured infinite path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    NotAHomomorphism,
    NotAWalk,
    PatternNotK3,
    ScaleExceeded,
    Truncated,
    ValidationError,
    ZeroSize,
)

Edge = tuple[int, int]


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1."""

    n: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("negative vertex count")
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"loop at {u}")
            if not (0 <= u < v < self.n):
                raise ValidationError(f"edge ({u},{v}) out of range or unnormalised")

    @staticmethod
    def from_edges(n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return Graph(n, frozenset(_norm_edge(int(u), int(v)) for u, v in edges))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(s) for s in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def components(self) -> list[tuple[int, ...]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = []
            stack = [s]
            seen[s] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(tuple(sorted(comp)))
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "edges": sorted(list(e) for e in self.edges)}

    @staticmethod
    def from_json(obj: Mapping) -> "Graph":
        return Graph.from_edges(int(obj["n"]), obj["edges"])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


K2 = complete_graph(2)
K3 = complete_graph(3)


def petersen_graph() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, 5 + i) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, edges)


@dataclass(frozen=True)
class ColouredGraph:
    """Host graph with a validated homomorphism into the pattern."""

    host: Graph
    pattern: Graph
    sigma: tuple[int, ...]

    def __post_init__(self):
        if len(self.sigma) != self.host.n:
            raise ValidationError("sigma length differs from host order")
        for c in self.sigma:
            if not (0 <= c < self.pattern.n):
                raise ValidationError(f"colour {c} outside pattern")
        for u, v in sorted(self.host.edges):
            if not self.pattern.has_edge(self.sigma[u], self.sigma[v]):
                raise NotAHomomorphism((u, v))

    def colour_class(self, colour: int) -> tuple[int, ...]:
        return tuple(v for v in range(self.host.n) if self.sigma[v] == colour)

    def is_surjective(self) -> bool:
        return set(self.sigma) == set(range(self.pattern.n))

    def to_json(self) -> dict:
        return {
            "host": self.host.to_json(),
            "pattern": self.pattern.to_json(),
            "sigma": list(self.sigma),
        }

    @staticmethod
    def from_json(obj: Mapping) -> "ColouredGraph":
        return ColouredGraph(
            Graph.from_json(obj["host"]),
            Graph.from_json(obj["pattern"]),
            tuple(int(c) for c in obj["sigma"]),
        )


def validate_coloured(host: Graph, pattern: Graph, sigma: Sequence[int]) -> ColouredGraph:
    """Build a ColouredGraph, raising NotAHomomorphism with the first
    violating edge (in sorted edge order)."""
    return ColouredGraph(host, pattern, tuple(int(c) for c in sigma))


HOM_MAX_SOURCE = 10**4
HOM_MAX_TARGET = 12


@dataclass(frozen=True)
class HomSearchResult:
    status: str  # "found" | "none" | "budget"
    mapping: Optional[tuple[int, ...]]

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def exhausted(self) -> bool:
        return self.status == "none"


def hom_exists(g: Graph, t: Graph, budget: int = 10**6) -> HomSearchResult:
    """Backtracking homomorphism search g -> t with candidate propagation.

    Variables are ordered by descending degree; assigning a vertex prunes
    its neighbours' candidate sets to the target neighbourhood, and the
    propagation runs to a fixpoint, so K2 targets are decided without
    branching.  The budget caps node expansions; hitting it yields the
    explicit "budget" outcome.
    """
    if g.n > HOM_MAX_SOURCE or t.n > HOM_MAX_TARGET:
        raise ScaleExceeded("homomorphism search size bounds exceeded")
    if g.n == 0:
        return HomSearchResult("found", ())
    if t.n == 0 or (g.m > 0 and t.m == 0):
        return HomSearchResult("none", None)
    t_adj = [set(t.adjacency[c]) for c in range(t.n)]
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    rank = {v: i for i, v in enumerate(order)}
    all_colours = frozenset(range(t.n))
    cand: list[frozenset[int]] = [all_colours] * g.n
    assignment: list[int] = [-1] * g.n
    expansions = 0

    def propagate(cands: list[frozenset[int]], queue: list[int]) -> Optional[list[frozenset[int]]]:
        cands = cands[:]
        while queue:
            v = queue.pop()
            allowed = frozenset(
                c2 for c in cands[v] for c2 in t_adj[c]
            )
            for w in g.adjacency[v]:
                new = cands[w] & allowed
                if not new:
                    return None
                if new != cands[w]:
                    cands[w] = new
                    queue.append(w)
        return cands

    def search(i: int, cands: list[frozenset[int]]) -> Optional[str]:
        nonlocal expansions
        if i == g.n:
            return "found"
        v = order[i]
        for c in sorted(cands[v]):
            expansions += 1
            if expansions > budget:
                return "budget"
            nxt = cands[:]
            nxt[v] = frozenset([c])
            nxt = propagate(nxt, [v])
            if nxt is None:
                continue
            assignment[v] = c
            res = search(i + 1, nxt)
            if res is not None:
                return res
            assignment[v] = -1
        return None

    res = search(0, cand)
    if res == "found":
        mapping = tuple(assignment)
        for u, v in g.edges:
            assert t.has_edge(mapping[u], mapping[v])
        return HomSearchResult("found", mapping)
    if res == "budget":
        return HomSearchResult("budget", None)
    return HomSearchResult("none", None)


def blow_up(cg: ColouredGraph, sizes: Mapping[int, int] | Sequence[int]) -> ColouredGraph:
    """Replace each host vertex by an independent set of the given size,
    each edge by a complete bipartite graph; colours are inherited."""
    if isinstance(sizes, Mapping):
        size_list = [int(sizes[v]) for v in range(cg.host.n)]
    else:
        size_list = [int(s) for s in sizes]
    if len(size_list) != cg.host.n:
        raise ValidationError("one size per host vertex required")
    if any(s <= 0 for s in size_list):
        raise ZeroSize("blow-up sizes must be positive")
    offsets = [0] * cg.host.n
    total = 0
    for v in range(cg.host.n):
        offsets[v] = total
        total += size_list[v]
    edges = []
    for u, v in cg.host.edges:
        for i in range(size_list[u]):
            for j in range(size_list[v]):
                edges.append((offsets[u] + i, offsets[v] + j))
    sigma = []
    for v in range(cg.host.n):
        sigma.extend([cg.sigma[v]] * size_list[v])
    return ColouredGraph(Graph.from_edges(total, edges), cg.pattern, tuple(sigma))


DEFAULT_MAX_CYCLES = 10**5
DEFAULT_MAX_CYCLE_LEN = 20


@dataclass(frozen=True)
class CycleList:
    """Simple cycles as vertex tuples, deduplicated up to rotation and
    reflection; truncated is set when either cap was hit."""

    cycles: tuple[tuple[int, ...], ...]
    truncated: bool


def enumerate_cycles(
    g: Graph,
    max_count: int = DEFAULT_MAX_CYCLES,
    max_len: int = DEFAULT_MAX_CYCLE_LEN,
) -> CycleList:
    """All simple cycles up to the caps.

    Each cycle is reported exactly once: rooted at its smallest vertex,
    with the second vertex smaller than the last (kills the reflection).
    """
    cycles: list[tuple[int, ...]] = []
    count_capped = False
    length_pruned = False
    adj = g.adjacency

    def dfs(root: int, v: int, path: list[int], used: set[int]) -> bool:
        # returns False when the count cap is hit
        nonlocal length_pruned
        for w in sorted(adj[v]):
            if w == root and len(path) >= 3:
                if path[1] < path[-1]:
                    if len(cycles) >= max_count:
                        return False
                    cycles.append(tuple(path))
            elif w > root and w not in used:
                if len(path) >= max_len:
                    # cap stopped an extension that may have closed a cycle
                    length_pruned = True
                    continue
                used.add(w)
                path.append(w)
                ok = dfs(root, w, path, used)
                path.pop()
                used.remove(w)
                if not ok:
                    return False
        return True

    for root in range(g.n):
        if not dfs(root, root, [root], {root}):
            count_capped = True
            break
    return CycleList(tuple(cycles), count_capped or length_pruned)


def cycle_basis(g: Graph) -> list[tuple[int, ...]]:
    """Fundamental cycles of a BFS spanning forest; the count is
    m - n + #components."""
    parent: dict[int, int] = {}
    depth: dict[int, int] = {}
    tree_edges: set[Edge] = set()
    for root in range(g.n):
        if root in parent:
            continue
        parent[root] = root
        depth[root] = 0
        queue = [root]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for w in sorted(g.adjacency[u]):
                if w not in parent:
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    tree_edges.add(_norm_edge(u, w))
                    queue.append(w)
    cycles = []
    for u, v in sorted(g.edges):
        if (u, v) in tree_edges:
            continue
        pu, pv = [u], [v]
        a, b = u, v
        while depth[a] > depth[b]:
            a = parent[a]
            pu.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            pv.append(b)
        while a != b:
            a, b = parent[a], parent[b]
            pu.append(a)
            pv.append(b)
        cycle = pu + pv[-2::-1]
        cycles.append(tuple(cycle))
    assert len(cycles) == g.m - g.n + len(g.components())
    return cycles


def _require_k3(cg: ColouredGraph) -> None:
    if cg.pattern.n != 3 or cg.pattern.m != 3:
        raise PatternNotK3("operation requires the K3 pattern")


def wrap(cg: ColouredGraph, walk: Sequence[int]) -> int:
    """Signed colour-step count of a walk in a K3-coloured graph: +1 when
    the colour advances cyclically, -1 when it retreats."""
    _require_k3(cg)
    if len(walk) < 2:
        return 0
    total = 0
    for u, v in zip(walk, walk[1:]):
        if not cg.host.has_edge(u, v):
            raise NotAWalk(f"({u},{v}) is not an edge")
        total += 1 if (cg.sigma[v] - cg.sigma[u]) % 3 == 1 else -1
    return total


def wrap_of_cycle(cg: ColouredGraph, cycle: Sequence[int]) -> int:
    """Wrap of a closed traversal of the cycle."""
    return wrap(cg, list(cycle) + [cycle[0]])


@dataclass(frozen=True)
class LevelMapResult:
    """Either an integer level per vertex (adjacent levels differ by one
    and level mod 3 matches the colour), or a wrapped cycle refuting it."""

    levels: Optional[tuple[int, ...]]
    wrapped_cycle: Optional[tuple[int, ...]]

    @property
    def exists(self) -> bool:
        return self.levels is not None


def colour_hom_to_p3inf(cg: ColouredGraph) -> LevelMapResult:
    """Level map of a K3-coloured graph onto the cyclically 3-coloured
    infinite path, or a wrapped cycle witnessing that none exists.

    Each component is anchored at its smallest vertex, whose level is its
    colour index (levels are unique per component up to shifts by 3).
    """
    _require_k3(cg)
    n = cg.host.n
    levels: list[Optional[int]] = [None] * n
    parent = [-1] * n
    for root in range(n):
        if levels[root] is not None:
            continue
        levels[root] = cg.sigma[root]
        stack = [root]
        while stack:
            u = stack.pop()
            for v in sorted(cg.host.adjacency[u]):
                step = 1 if (cg.sigma[v] - cg.sigma[u]) % 3 == 1 else -1
                lv = levels[u] + step
                if levels[v] is None:
                    levels[v] = lv
                    parent[v] = u
                    stack.append(v)
                elif levels[v] != lv:
                    # tree path u -> v plus the edge uv is a wrapped cycle
                    anc_u = []
                    x = u
                    while x != -1:
                        anc_u.append(x)
                        x = parent[x]
                    anc_set = {x: i for i, x in enumerate(anc_u)}
                    path_v = []
                    y = v
                    while y not in anc_set:
                        path_v.append(y)
                        y = parent[y]
                    cycle = anc_u[: anc_set[y] + 1][::-1] + path_v[::-1]
                    return LevelMapResult(None, normalize_cycle(cycle))
    return LevelMapResult(tuple(levels), None)


def normalize_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate to the smallest vertex and fix the direction so the second
    vertex is smaller than the last."""
    k = min(range(len(cycle)), key=lambda i: cycle[i])
    rot = tuple(cycle[k:]) + tuple(cycle[:k])
    if len(rot) >= 3 and rot[1] > rot[-1]:
        rot = (rot[0],) + rot[1:][::-1]
    return rot


def has_increasing_cycle(
    cg: ColouredGraph,
    ordering: Sequence[int],
    max_count: int = DEFAULT_MAX_CYCLES,
    max_len: int = DEFAULT_MAX_CYCLE_LEN,
) -> Optional[tuple[int, ...]]:
    """A simple cycle along which the ordered colour values strictly
    increase on all but exactly one step, or None after an exhaustive
    enumeration.  Raises Truncated when the cycle list was capped and no
    witness appeared."""
    listing = enumerate_cycles(cg.host, max_count=max_count, max_len=max_len)
    for cycle in listing.cycles:
        vals = [ordering[cg.sigma[v]] for v in cycle]
        for seq, cyc in ((vals, cycle), (vals[::-1], cycle[::-1])):
            descents = sum(
                1 for i in range(len(seq)) if seq[(i + 1) % len(seq)] <= seq[i]
            )
            if descents == 1:
                k = min(range(len(cyc)), key=lambda i: seq[i])
                return tuple(cyc[k:] + cyc[:k])
    if listing.truncated:
        raise Truncated("cycle enumeration capped before a witness was found")
    return None
