"""Farness machinery: copy packings, uniform-farness witnesses and their
extraction, and exact small-motif counting with a dense-core refinement.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    BudgetExhausted,
    NoTriangles,
    PackingTooSmall,
    ScaleExceeded,
    ValidationError,
)
from .graphs import Edge, Graph

PACKING_MAX_PATTERN = 5


def _copy_edges(pattern: Graph, copy: Sequence[int]) -> list[Edge]:
    out = []
    for a, b in pattern.edges:
        u, v = copy[a], copy[b]
        out.append((min(u, v), max(u, v)))
    return out


def _embeddings(g: Graph, pattern: Graph, free_edges: set[Edge]):
    """Ordered embeddings of the pattern whose image edges are all free,
    in lexicographic order of the image tuple.  Membership is tested
    live, so shrinking free_edges during iteration prunes later
    candidates."""
    p_adj = pattern.adjacency

    def rec(i: int, image: list[int]):
        if i == pattern.n:
            yield tuple(image)
            return
        for v in range(g.n):
            if v in image:
                continue
            ok = True
            for j in range(i):
                if j in p_adj[i]:
                    e = (min(v, image[j]), max(v, image[j]))
                    if e not in free_edges:
                        ok = False
                        break
            if ok:
                image.append(v)
                yield from rec(i + 1, image)
                image.pop()

    yield from rec(0, [])


def greedy_packing(g: Graph, pattern: Graph) -> tuple[tuple[int, ...], ...]:
    """Maximal family of edge-disjoint pattern copies, greedy in
    lexicographic order of the embedding tuples.

    One pass suffices for maximality: a skipped embedding conflicted with
    edges already used, and the used set only grows."""
    if pattern.n > PACKING_MAX_PATTERN:
        raise ScaleExceeded(f"pattern order limited to {PACKING_MAX_PATTERN}")
    if pattern.m == 0:
        raise ValidationError("pattern must have at least one edge")
    free = set(g.edges)
    packing = []
    for copy in _embeddings(g, pattern, free):
        edges = _copy_edges(pattern, copy)
        if len(set(edges)) == len(edges) and all(e in free for e in edges):
            packing.append(copy)
            free -= set(edges)
    return tuple(packing)


@dataclass(frozen=True)
class UniformFarWitness:
    """Pattern partition plus an aligned edge-disjoint copy family
    covering every vertex eps * |G| times."""

    partition: tuple[int, ...]  # vertex -> pattern vertex
    packing: tuple[tuple[int, ...], ...]  # copies indexed by pattern vertex
    eps: float


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    failure: Optional[str] = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "failure": self.failure}


def verify_uniform_far(g: Graph, pattern: Graph, witness: UniformFarWitness) -> WitnessCheck:
    """Check the witness definition plus its structural consequences:
    aligned edge-disjoint copies, coverage eps*|G| at every vertex, the
    packing at least (eps/|F|)*|G|^2, minimum degree eps*|G| into each
    adjacent part, and part sizes eps*|G| for non-isolated pattern
    vertices."""
    n = g.n
    if len(witness.partition) != n:
        return WitnessCheck(False, "partition length differs from graph order")
    for v, p in enumerate(witness.partition):
        if not 0 <= p < pattern.n:
            return WitnessCheck(False, f"vertex {v} assigned to non-pattern part {p}")
    for u, v in sorted(g.edges):
        if not pattern.has_edge(witness.partition[u], witness.partition[v]):
            return WitnessCheck(False, f"edge ({u},{v}) joins non-adjacent parts")
    used: set[Edge] = set()
    coverage = [0] * n
    for idx, copy in enumerate(witness.packing):
        if len(copy) != pattern.n or len(set(copy)) != pattern.n:
            return WitnessCheck(False, f"copy {idx} is not injective on pattern vertices")
        for i, v in enumerate(copy):
            if witness.partition[v] != i:
                return WitnessCheck(False, f"copy {idx} is not part-aligned at {v}")
        edges = _copy_edges(pattern, copy)
        for e in edges:
            if e not in g.edges:
                return WitnessCheck(False, f"copy {idx} misses edge {e}")
            if e in used:
                return WitnessCheck(False, f"copy {idx} reuses edge {e}")
            used.add(e)
        for v in copy:
            coverage[v] += 1
    need = witness.eps * n
    for v in range(n):
        if coverage[v] < need:
            return WitnessCheck(False, f"vertex {v} lies in {coverage[v]} < eps*n copies")
    if len(witness.packing) < witness.eps / pattern.n * n * n:
        return WitnessCheck(False, "packing smaller than (eps/|F|) * n^2")
    parts: dict[int, list[int]] = defaultdict(list)
    for v, p in enumerate(witness.partition):
        parts[p].append(v)
    for i in range(pattern.n):
        if pattern.degree(i) > 0 and len(parts.get(i, ())) < need:
            return WitnessCheck(False, f"part {i} smaller than eps*n")
    for v in range(n):
        i = witness.partition[v]
        for j in pattern.adjacency[i]:
            nbrs = sum(1 for w in g.adjacency[v] if witness.partition[w] == j)
            if nbrs < need:
                return WitnessCheck(
                    False, f"vertex {v} has {nbrs} < eps*n neighbours in part {j}"
                )
    return WitnessCheck(True)


UNIFORMIZE_RETRY_CAP = 64


def uniformize(
    g: Graph,
    pattern: Graph,
    packing: Sequence[tuple[int, ...]],
    eps: float,
    seed: int = 0,
    retry_cap: int = UNIFORMIZE_RETRY_CAP,
) -> tuple[Graph, UniformFarWitness, tuple[int, ...]]:
    """Extract a uniformly far subgraph from an edge-disjoint copy family.

    Seeded random pattern partitions are retried until at least a
    |F|^-|F| fraction of the copies is aligned; vertices on fewer than
    eps/(2|F|^|F|) * n of the surviving copies then lose their copies,
    and the output graph is the union of what remains.  Verifies at
    eps' = eps/(2 |F|^|F|).  Returns (subgraph, witness, vertex map back
    into g).
    """
    n = g.n
    copies = [tuple(c) for c in packing]
    if len(copies) < eps * n * n:
        raise PackingTooSmall(f"{len(copies)} copies < eps * n^2 = {eps * n * n:.1f}")
    rng = random.Random(seed)
    ff = pattern.n**pattern.n
    survivors: list[tuple[int, ...]] = []
    partition: list[int] = []
    for _ in range(retry_cap):
        partition = [rng.randrange(pattern.n) for _ in range(n)]
        survivors = [
            c for c in copies if all(partition[v] == i for i, v in enumerate(c))
        ]
        if len(survivors) * ff >= len(copies):
            break
    else:
        raise BudgetExhausted(
            f"no partition kept a 1/{ff} fraction of copies within {retry_cap} tries"
        )
    threshold = eps / (2 * ff) * n
    counts: dict[int, int] = defaultdict(int)
    holder: dict[int, list[int]] = defaultdict(list)
    for idx, c in enumerate(survivors):
        for v in c:
            counts[v] += 1
            holder[v].append(idx)
    dead: set[int] = set()
    queue = [v for v, k in counts.items() if 0 < k < threshold]
    while queue:
        v = queue.pop()
        if not 0 < counts[v] < threshold:
            continue
        for idx in holder[v]:
            if idx in dead:
                continue
            dead.add(idx)
            for w in survivors[idx]:
                counts[w] -= 1
                if 0 < counts[w] < threshold:
                    queue.append(w)
    final = [c for i, c in enumerate(survivors) if i not in dead]
    verts = sorted({v for c in final for v in c})
    relabel = {v: i for i, v in enumerate(verts)}
    edges = {
        (min(relabel[a], relabel[b]), max(relabel[a], relabel[b]))
        for c in final
        for a, b in _copy_edges(pattern, c)
    }
    sub = Graph.from_edges(len(verts), edges)
    witness = UniformFarWitness(
        tuple(partition[v] for v in verts),
        tuple(tuple(relabel[v] for v in c) for c in final),
        eps / (2 * ff),
    )
    return sub, witness, tuple(verts)


def count_p4_aligned(g: Graph, parts: tuple[Sequence[int], Sequence[int], Sequence[int]]) -> int:
    """Exact count of paths x1 x2 x3 x4 with the ends in the first part,
    x2 in the second and x3 in the third."""
    part_a, part_b, part_c = (set(p) for p in parts)
    whole = part_a | part_b | part_c
    if len(part_a) + len(part_b) + len(part_c) != len(whole):
        raise ValidationError("parts must be disjoint")
    for u, v in g.edges:
        if u in whole and v in whole:
            pa = (u in part_a) + (v in part_a)
            pb = (u in part_b) + (v in part_b)
            pc = (u in part_c) + (v in part_c)
            if 2 in (pa, pb, pc):
                raise ValidationError(f"edge ({u},{v}) lies inside one part")
    total = 0
    for b in part_b:
        for c in g.adjacency[b] & part_c:
            da = len(g.adjacency[b] & part_a)
            dc = len(g.adjacency[c] & part_a)
            common = len(g.adjacency[b] & g.adjacency[c] & part_a)
            total += da * dc - common
    return total


COUNT_C5_MAX = 300


def count_c5(g: Graph) -> int:
    """Exact number of unlabelled 5-cycles via closed-walk traces.

    tr(A^5) counts closed 5-walks; subtracting the walks that revisit a
    vertex (5 per triangle-with-doubled-edge configuration) leaves ten
    traversals per 5-cycle.  Entries stay far below 2^63 at the enforced
    size cap.
    """
    if g.n > COUNT_C5_MAX:
        raise ScaleExceeded(f"count_c5 limited to {COUNT_C5_MAX} vertices")
    if g.n == 0:
        return 0
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1
    a2 = a @ a
    a3 = a2 @ a
    a5 = a3 @ a2
    tr5 = int(np.trace(a5))
    tr3 = int(np.trace(a3))
    deg = a.sum(axis=1)
    corr = int(sum((int(deg[i]) - 2) * int(a3[i, i]) for i in range(g.n)))
    return (tr5 - 5 * tr3 - 5 * corr) // 10


@dataclass(frozen=True)
class DenseCoreReport:
    tripartition: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    aligned_triangles: tuple[tuple[int, int, int], ...]
    a_sets: tuple[tuple[int, ...], ...]
    a_masses: tuple[int, ...]
    b_sets: tuple[tuple[int, ...], ...]
    b_masses: tuple[int, ...]
    c5_yields: tuple[tuple[int, int], ...]  # (vertex, aligned-path count)
    delta: float
    seed: int
    iteration_bound: int

    @property
    def c5_total(self) -> int:
        return sum(y for _, y in self.c5_yields)

    def to_json(self) -> dict:
        return {
            "tripartition": [list(p) for p in self.tripartition],
            "aligned_triangles": [list(t) for t in self.aligned_triangles],
            "a_sets": [list(s) for s in self.a_sets],
            "a_masses": list(self.a_masses),
            "b_sets": [list(s) for s in self.b_sets],
            "b_masses": list(self.b_masses),
            "c5_yields": [list(p) for p in self.c5_yields],
            "c5_total": self.c5_total,
            "delta": self.delta,
            "seed": self.seed,
            "iteration_bound": self.iteration_bound,
        }


def _refine_side(
    triangles: list[tuple[int, int, int]],
    side: set[int],
    n: int,
    delta: float,
    bound: int,
) -> tuple[list[tuple[int, ...]], list[int], set[int]]:
    """Refinement of one tripartition side.

    Each transversal triangle has exactly one vertex on the side and
    survives while that vertex does.  A step keeps the side vertices on
    at least delta * p_i * n surviving triangles (p_i the current mass
    over n * |side_i|) and stops as soon as it retains a delta fraction
    of the side.  Returns the per-step sets, the per-step masses, and
    the final core."""
    sets_hist: list[tuple[int, ...]] = []
    mass_hist: list[int] = []
    current = set(side)
    for _ in range(bound + 1):
        alive = [t for t in triangles if all(v in current or v not in side for v in t)]
        sets_hist.append(tuple(sorted(current)))
        mass_hist.append(len(alive))
        if not current or not alive:
            break
        p_i = len(alive) / (n * len(current))
        need = delta * p_i * n
        per_vertex: dict[int, int] = defaultdict(int)
        for t in alive:
            for v in t:
                if v in current:
                    per_vertex[v] += 1
        nxt = {v for v in current if per_vertex[v] >= need}
        stop = len(nxt) >= delta * len(current)
        current = nxt
        if stop:
            alive = [t for t in triangles if all(v in current or v not in side for v in t)]
            sets_hist.append(tuple(sorted(current)))
            mass_hist.append(len(alive))
            break
    return sets_hist, mass_hist, current


DENSE_CORE_RETRY_CAP = 64


def dense_core_c5(
    g: Graph, delta: float = 0.01, seed: int = 0, retry_cap: int = DENSE_CORE_RETRY_CAP
) -> DenseCoreReport:
    """Transversal-triangle core refinement with per-vertex 5-cycle yield.

    A seeded random balanced tripartition is retried until at least a
    fifth of a maximal edge-disjoint triangle packing is transversal (one
    vertex per part; a random partition achieves 2/9 in expectation).
    The graph is restricted to those triangles' edges, the first and
    second parts are refined by the delta threshold, and each surviving
    second-part vertex reports its aligned-path count through its
    neighbourhood, each such path closing into a distinct 5-cycle.
    """
    from .graphs import K3

    packing = greedy_packing(g, K3)
    if not packing:
        raise NoTriangles("graph has no triangle packing")
    rng = random.Random(seed)
    n = g.n
    order = list(range(n))
    parts: tuple[set[int], set[int], set[int]] = (set(), set(), set())
    aligned: list[tuple[int, int, int]] = []
    for _ in range(retry_cap):
        rng.shuffle(order)
        third = (n + 2) // 3
        pa = set(order[:third])
        pb = set(order[third : 2 * third])
        pc = set(order[2 * third :])
        aligned = [
            tuple(sorted(t))
            for t in packing
            if {len(set(t) & pa), len(set(t) & pb), len(set(t) & pc)} == {1}
        ]
        if 5 * len(aligned) >= len(packing):
            parts = (pa, pb, pc)
            break
    else:
        raise BudgetExhausted(
            f"no tripartition kept a fifth of the packing within {retry_cap} tries"
        )
    bound = math.ceil(math.log(max(n, 2)) / math.log(1 / delta))
    pa, pb, pc = parts
    a_sets, a_masses, a_final = _refine_side(aligned, pa, n, delta, bound)
    surviving = [t for t in aligned if all(v not in pa or v in a_final for v in t)]
    b_sets, b_masses, b_final = _refine_side(surviving, pb, n, delta, bound)
    surviving = [t for t in surviving if all(v not in pb or v in b_final for v in t)]
    # restrict to the aligned triangles' edges for the yield counts
    edges = set()
    for t in surviving:
        x, y, z = t
        edges.update({(min(x, y), max(x, y)), (min(x, z), max(x, z)), (min(y, z), max(y, z))})
    core = Graph.from_edges(n, edges)
    yields: list[tuple[int, int]] = []
    for x in sorted(b_final):
        hood = core.adjacency[x] & a_final
        cnt = count_p4_aligned(
            core, (sorted(hood), sorted(pb - {x}), sorted(pc))
        )
        yields.append((x, cnt))
    return DenseCoreReport(
        (tuple(sorted(pa)), tuple(sorted(pb)), tuple(sorted(pc))),
        tuple(surviving),
        tuple(a_sets),
        tuple(a_masses),
        tuple(b_sets),
        tuple(b_masses),
        tuple(yields),
        delta,
        seed,
        bound,
    )
