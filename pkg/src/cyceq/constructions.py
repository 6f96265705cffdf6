"""Explicit constructions: progression-free sets, difference graphs with
canonical packings, the tripartite set-membership family with its
15-vertex core, and the layered-graph distinct-solution finder.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import equations as eqmod
from .equations import Equation, SolutionClass
from .errors import ScaleExceeded, ValidationError
from .graphs import ColouredGraph, Edge, Graph

# ---------------------------------------------------------------------------
# progression-free sets

BEHREND_MAX_N = 10**6
BEHREND_BASES = range(3, 21)
# dimension 13 keeps the digit-{0,1} family ahead of the ternary baseline
# across the whole allowed range of N
BEHREND_DIMS = range(2, 14)


@dataclass(frozen=True)
class BehrendSet:
    """Progression-free subset of [N] from digit vectors on a sphere."""

    n: int
    members: tuple[int, ...]
    base: int
    dim: int
    radius_sq: Optional[int]  # None for the no-carry digit family

    def __len__(self) -> int:
        return len(self.members)


def has_nontrivial_ap3(members: Sequence[int]) -> Optional[tuple[int, int, int]]:
    """O(|A|^2) oracle: find x, y, z in the set with x + y = 2z and not
    all equal, or None."""
    vals = sorted(set(members))
    present = set(vals)
    for i, x in enumerate(vals):
        for y in vals[i + 1 :]:
            if (x + y) % 2 == 0 and (x + y) // 2 in present:
                return (x, y, (x + y) // 2)
    return None


def ternary_digit_baseline(n: int) -> int:
    """How many integers in [1, n] use only digits 0 and 1 in base 3."""
    digits = 1
    while 3**digits <= n:
        digits += 1
    powers = [3**i for i in range(digits)]
    count = 0
    for mask in range(1, 1 << digits):
        if sum(p for i, p in enumerate(powers) if mask >> i & 1) <= n:
            count += 1
    return count


def _digit_vectors(base: int, dim: int, limit: int) -> Iterable[tuple[int, ...]]:
    """Vectors over {0..ceil(base/2)-1}^dim whose base-expansion value is
    at most limit; digit pairs never carry since 2*(m-1) < base."""
    m = (base + 1) // 2
    powers = [base**i for i in range(dim)]

    def rec(i: int, val: int, acc: list[int]):
        if i < 0:
            yield tuple(acc)
            return
        for d in range(m):
            v = val + d * powers[i]
            if v > limit:
                break
            acc[i] = d
            yield from rec(i - 1, v, acc)
        acc[i] = 0

    yield from rec(dim - 1, 0, [0] * dim)


def behrend_set(n: int) -> BehrendSet:
    """Largest progression-free set over the parameter scan.

    Candidates per base d and dimension k: each sphere class (fixed sum
    of squared digits) of the no-carry vectors, and, when the digit range
    is {0, 1}, the whole digit family (no sphere needed: digitwise
    x + y = 2z already forces equality).  Members are 1 + value so the
    set sits inside [n].  Ties prefer smaller base, then smaller
    dimension.
    """
    if n > BEHREND_MAX_N:
        raise ScaleExceeded(f"behrend_set limited to N <= {BEHREND_MAX_N}")
    if n < 1:
        raise ValidationError("N must be positive")
    best: Optional[BehrendSet] = None
    for d in BEHREND_BASES:
        m = (d + 1) // 2
        for k in BEHREND_DIMS:
            if m**k <= (0 if best is None else len(best)):
                continue
            spheres: dict[int, list[int]] = defaultdict(list)
            total: list[int] = []
            for vec in _digit_vectors(d, k, n - 1):
                val = sum(x * d**i for i, x in enumerate(vec))
                spheres[sum(x * x for x in vec)].append(1 + val)
                if m == 2:
                    total.append(1 + val)
            candidates: list[tuple[tuple[int, ...], Optional[int]]] = [
                (tuple(sorted(vals)), r2) for r2, vals in sorted(spheres.items())
            ]
            if m == 2 and total:
                candidates.append((tuple(sorted(total)), None))
            for members, r2 in candidates:
                if best is None or len(members) > len(best):
                    best = BehrendSet(n, members, d, k, r2)
    assert best is not None
    assert has_nontrivial_ap3(best.members) is None
    assert len(best) >= ternary_digit_baseline(n)
    return best


# ---------------------------------------------------------------------------
# difference graphs with canonical packings

RS_MAX_PATTERN = 6
RS_MAX_PART = 10**5


@dataclass(frozen=True)
class RSGraph:
    """Pattern-partite difference graph on parts of size n*N encoding a
    set A, with its canonical packing of edge-disjoint pattern copies."""

    pattern: Graph
    ordering: tuple[int, ...]
    n_param: int  # N
    part_size: int  # max(ordering) * N
    members: tuple[int, ...]  # the set A
    coloured: ColouredGraph
    packing: tuple[tuple[int, ...], ...]  # copy index (x, a) -> vertex tuple
    packing_keys: tuple[tuple[int, int], ...]
    dropped: int

    def vertex(self, f_vertex: int, value: int) -> int:
        if not 1 <= value <= self.part_size:
            raise ValidationError(f"value {value} outside part range")
        return f_vertex * self.part_size + (value - 1)

    def value_of(self, vertex: int) -> tuple[int, int]:
        return divmod(vertex, self.part_size)[0], vertex % self.part_size + 1


def rs_graph(
    pattern: Graph, ordering: Sequence[int], n_param: int, members: Iterable[int]
) -> RSGraph:
    """Edges between parts u, v are the pairs whose difference lies in
    (c(v) - c(u)) * A; canonical copies place x + (c(w) - 1) * a at part w
    for x in [N], a in A."""
    ordering = tuple(int(c) for c in ordering)
    a_set = tuple(sorted(set(int(a) for a in members)))
    if pattern.n > RS_MAX_PATTERN:
        raise ScaleExceeded(f"pattern order limited to {RS_MAX_PATTERN}")
    if len(ordering) != pattern.n or len(set(ordering)) != pattern.n:
        raise ValidationError("ordering must injectively label the pattern vertices")
    if any(c < 1 for c in ordering):
        raise ValidationError("ordering values must be positive")
    if any(a < 1 or a > n_param for a in a_set):
        raise ValidationError("set members must lie in [N]")
    top = max(ordering)
    part = top * n_param
    if part > RS_MAX_PART:
        raise ScaleExceeded(f"part size {part} exceeds {RS_MAX_PART}")
    edges = []
    for u, v in sorted(pattern.edges):
        delta = ordering[v] - ordering[u]
        for a in a_set:
            diff = delta * a
            for x in range(1, part + 1):
                y = x + diff
                if 1 <= y <= part:
                    edges.append((u * part + (x - 1), v * part + (y - 1)))
    host = Graph.from_edges(pattern.n * part, edges)
    sigma = tuple(w for w in range(pattern.n) for _ in range(part))
    coloured = ColouredGraph(host, pattern, sigma)
    packing = []
    keys = []
    dropped = 0
    for x in range(1, n_param + 1):
        for a in a_set:
            copy = []
            ok = True
            for w in range(pattern.n):
                val = x + (ordering[w] - 1) * a
                if not 1 <= val <= part:
                    ok = False
                    break
                copy.append(w * part + (val - 1))
            if ok:
                packing.append(tuple(copy))
                keys.append((x, a))
            else:
                dropped += 1
    return RSGraph(
        pattern,
        ordering,
        n_param,
        part,
        a_set,
        coloured,
        tuple(packing),
        tuple(keys),
        dropped,
    )


def enumerate_triangles(g: Graph) -> list[tuple[int, int, int]]:
    out = []
    for u, v in sorted(g.edges):
        for w in sorted(g.adjacency[u] & g.adjacency[v]):
            if w > v:
                out.append((u, v, w))
    return out


# ---------------------------------------------------------------------------
# the tripartite set-membership family

GN_MAX = 4


def _gn_subsets(n: int, proper_nonempty: bool) -> list[frozenset[int]]:
    universe = range(1, n + 1)
    sizes = range(1, n) if proper_nonempty else range(0, n + 1)
    return [
        frozenset(c)
        for k in sizes
        for c in itertools.combinations(universe, k)
    ]


def _membership_graph(n: int, proper_nonempty: bool) -> Graph:
    subsets = _gn_subsets(n, proper_nonempty)
    s = len(subsets)
    edges = []
    for i, a in enumerate(range(1, n + 1)):
        for j, x in enumerate(subsets):
            if a in x:
                edges.append((i, n + j))
                edges.append((i, n + s + j))
    for j, x in enumerate(subsets):
        for k, y in enumerate(subsets):
            if not (x & y):
                edges.append((n + j, n + s + k))
    return Graph.from_edges(n + 2 * s, edges)


def g_n(n: int) -> Graph:
    """Tripartite graph: numbers 1..n, then two copies of the full power
    set; a number joins the sets containing it, and cross-copy sets join
    exactly when disjoint."""
    if n > GN_MAX:
        raise ScaleExceeded(f"g_n limited to n <= {GN_MAX}")
    return _membership_graph(n, proper_nonempty=False)


def fig5_graph() -> Graph:
    """The 15-vertex, 30-edge core: g_3 restricted to nonempty proper
    subsets on both set sides."""
    return _membership_graph(3, proper_nonempty=True)


def gn_vertex_labels(n: int, proper_nonempty: bool = False) -> list[str]:
    subsets = _gn_subsets(n, proper_nonempty)
    labels = [str(a) for a in range(1, n + 1)]
    labels += ["B" + "".join(map(str, sorted(x))) for x in subsets]
    labels += ["C" + "".join(map(str, sorted(x))) for x in subsets]
    return labels


# ---------------------------------------------------------------------------
# distinct-solution finder

LayerVertex = tuple[int, int]  # (layer, integer value)


@dataclass
class SolverInstance:
    """Layered path system for one equation split and one set A.

    The equation is split into two zero-sum halves with coefficients
    a_1..a_s and b_1..b_t (each half re-indexed from the original
    equation by a_indices / b_indices).  Every ordered pair (x, y) of
    distinct members contributes one path across the s+t-1 layers; paths
    are pairwise edge-disjoint because any edge determines its pair.
    """

    equation: Equation
    a_coeffs: tuple[int, ...]
    b_coeffs: tuple[int, ...]
    a_indices: tuple[int, ...]
    b_indices: tuple[int, ...]
    members: tuple[int, ...]
    n_param: int
    paths: dict[tuple[int, int], tuple[LayerVertex, ...]]
    adjacency: dict[LayerVertex, set[LayerVertex]]
    path_count_at: dict[LayerVertex, int]

    @property
    def s(self) -> int:
        return len(self.a_coeffs)

    @property
    def t(self) -> int:
        return len(self.b_coeffs)

    @property
    def layers(self) -> int:
        return self.s + self.t - 1

    def proof_constant(self) -> int:
        return (self.layers) * (
            sum(abs(a) for a in self.a_coeffs) + sum(abs(b) for b in self.b_coeffs)
        )

    def path_vertices(self, x: int, y: int) -> tuple[LayerVertex, ...]:
        s, t = self.s, self.t
        a, b = self.a_coeffs, self.b_coeffs
        verts: list[LayerVertex] = []
        for k in range(1, t):
            verts.append((k, a[0] * x + sum(b[j] for j in range(k - 1)) * y))
        for k in range(1, s + 1):
            verts.append(
                (k + t - 1, -sum(a[i] for i in range(k, s)) * x - b[t - 1] * y)
            )
        return tuple(verts)

    def recover_pair(self, edge: tuple[LayerVertex, LayerVertex]) -> tuple[int, int]:
        """Invert one path edge back to its generating ordered pair."""
        (k1, u), (k2, w) = sorted(edge)
        if k2 != k1 + 1:
            raise ValidationError("not a consecutive-layer edge")
        diff = w - u
        s, t = self.s, self.t
        a, b = self.a_coeffs, self.b_coeffs
        if k1 <= t - 1:
            y, rem = divmod(diff, b[k1 - 1])
            if rem:
                raise ValidationError("difference not divisible by the step coefficient")
            x, rem = divmod(u - sum(b[j] for j in range(k1 - 1)) * y, a[0])
        else:
            k = k1 - t + 1  # edge adds a_(k+1) * x
            x, rem = divmod(diff, a[k])
            if rem:
                raise ValidationError("difference not divisible by the step coefficient")
            y, rem = divmod(-(u + sum(a[i] for i in range(k, s)) * x), b[t - 1])
        if rem:
            raise ValidationError("edge does not invert to integers")
        return x, y


def split_by_genus(eq: Equation) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Two zero-sum halves of the coefficient indices: the genus witness
    part containing index 0, against the union of the other parts."""
    result = eqmod.genus(eq)
    if result.genus < 2:
        raise ValidationError("equation has genus one; no zero-sum split exists")
    parts = sorted(result.witness.parts, key=min)
    first = parts[0]
    rest = tuple(sorted(i for p in parts[1:] for i in p))
    return first, rest


def build_solver_instance(eq: Equation, members: Iterable[int], n_param: int) -> SolverInstance:
    a_idx, b_idx = split_by_genus(eq)
    a = tuple(eq.coeffs[i] for i in a_idx)
    b = tuple(eq.coeffs[i] for i in b_idx)
    vals = tuple(sorted(set(int(v) for v in members)))
    if any(v < 1 or v > n_param for v in vals):
        raise ValidationError("set members must lie in [N]")
    inst = SolverInstance(
        eq, a, b, a_idx, b_idx, vals, n_param, {}, defaultdict(set), defaultdict(int)
    )
    for x in vals:
        for y in vals:
            if x == y:
                continue
            verts = inst.path_vertices(x, y)
            inst.paths[(x, y)] = verts
            for p, q in zip(verts, verts[1:]):
                inst.adjacency[p].add(q)
                inst.adjacency[q].add(p)
            for p in verts:
                inst.path_count_at[p] += 1
    return inst


@dataclass(frozen=True)
class DistinctSolutionReport:
    assignment: Optional[tuple[int, ...]]
    abstain: bool
    reason: Optional[str]
    proof_constant: int
    path_count: int
    sparsify_threshold: float
    degree_target: int

    def to_json(self) -> dict:
        return {
            "assignment": list(self.assignment) if self.assignment else None,
            "abstain": self.abstain,
            "reason": self.reason,
            "proof_constant": self.proof_constant,
            "paths": self.path_count,
            "sparsify_threshold": self.sparsify_threshold,
            "degree_target": self.degree_target,
        }


WALK_BACKTRACK_BUDGET = 200_000


def find_distinct_solution(
    eq: Equation, members: Iterable[int], n_param: int
) -> DistinctSolutionReport:
    """Layered-graph search for an all-distinct solution inside the set.

    Builds one path per ordered pair, deletes the paths of vertices lying
    on fewer than |P| / (2cN) of them, then walks the layers picking at
    each step a neighbour whose new variable value is fresh (greedy with
    backtracking; above the degree target the greedy choice never needs
    to backtrack).  Abstains with a threshold report when the walk fails;
    abstention is not a nonexistence proof.
    """
    inst = build_solver_instance(eq, members, n_param)
    s, t = inst.s, inst.t
    c = inst.proof_constant()
    total_paths = len(inst.paths)
    threshold = total_paths / (2 * c * n_param)
    degree_target = 2 * (s + t)

    def report(assignment, reason=None):
        return DistinctSolutionReport(
            assignment,
            assignment is None,
            reason,
            c,
            total_paths,
            threshold,
            degree_target,
        )

    if total_paths == 0:
        return report(None, "fewer than two members")

    # sparsify: drop every path through a vertex on fewer than the
    # threshold; deletions can cascade
    counts = dict(inst.path_count_at)
    queue = [v for v, k in counts.items() if 0 < k < threshold]
    dead_paths: set[tuple[int, int]] = set()
    vertex_paths: dict[LayerVertex, list[tuple[int, int]]] = defaultdict(list)
    for key, verts in inst.paths.items():
        for v in verts:
            vertex_paths[v].append(key)
    while queue:
        v = queue.pop()
        if not 0 < counts.get(v, 0) < threshold:
            continue
        for key in vertex_paths[v]:
            if key in dead_paths:
                continue
            dead_paths.add(key)
            for w in inst.paths[key]:
                counts[w] -= 1
                if 0 < counts[w] < threshold:
                    queue.append(w)
    alive = {k: p for k, p in inst.paths.items() if k not in dead_paths}
    if not alive:
        return report(None, "sparsification removed every path")

    adj: dict[LayerVertex, set[LayerVertex]] = defaultdict(set)
    for verts in alive.values():
        for p, q in zip(verts, verts[1:]):
            adj[p].add(q)
            adj[q].add(p)

    layer1 = sorted(v for v in adj if v[0] == 1)
    a, b = inst.a_coeffs, inst.b_coeffs
    member_set = set(inst.members)
    budget = WALK_BACKTRACK_BUDGET
    nodes = 0

    def assemble(xs: list[int], ys: list[int]) -> tuple[int, ...]:
        out = [0] * eq.k
        for i, idx in enumerate(inst.a_indices):
            out[idx] = xs[i]
        for j, idx in enumerate(inst.b_indices):
            out[idx] = ys[j]
        return tuple(out)

    def walk(v: LayerVertex, xs: list[int], ys: list[int]) -> Optional[tuple[int, ...]]:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return None
        layer = v[0]
        if layer == inst.layers:
            return assemble(xs, ys)
        used = set(xs) | set(ys)
        for w in sorted(u for u in adj[v] if u[0] == layer + 1):
            diff = w[1] - v[1]
            if layer <= t - 1:
                new_y = diff // b[layer - 1]
                fresh = [new_y]
                nxt = (xs, ys + [new_y])
            else:
                k = layer - t + 1
                new_x = diff // a[k]
                fresh = [new_x]
                nxt = (xs + [new_x], ys)
            if layer + 1 == inst.layers:
                # last layer also pins the final b-variable
                last_y = -w[1] // b[t - 1]
                fresh = fresh + [last_y]
                nxt = (nxt[0], nxt[1] + [last_y])
            if any(f in used or f not in member_set for f in fresh):
                continue
            if len(set(fresh)) != len(fresh):
                continue
            res = walk(w, nxt[0], nxt[1])
            if res is not None:
                return res
        return None

    for start in layer1:
        x1 = start[1] // a[0]
        if x1 not in member_set:
            continue
        res = walk(start, [x1], [])
        if res is not None:
            cls = eqmod.classify_solution(eq, res)
            assert cls is SolutionClass.ALL_DISTINCT
            return report(res)
        if nodes > budget:
            return report(None, "walk backtracking budget exhausted")
    return report(None, "no fresh-valued walk across the layers")
