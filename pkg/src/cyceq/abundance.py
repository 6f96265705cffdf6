"""Machine-checkable derivations of pattern-abundance for coloured graphs.

A certificate is a rooted tree whose leaves are atoms (coloured graphs
with at most one edge) and whose internal nodes apply one of the
abundance-preserving constructions: peeling a vertex onto a
monochromatic attachment set, gluing a second graph into an edge through
a blow-up with identification, joining two graphs along colour classes,
taking subgraphs, and blowing up.  Every node declares its output graph;
the verifier replays each step and demands exact agreement, comparing
the root against the target up to colour-preserving canonical
relabelling only.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetExhausted, NotSurjective, ScaleExceeded, ValidationError
from .graphs import ColouredGraph, Edge, Graph

STEP_KINDS = ("atom", "peel", "glue", "join", "subgraph", "blowup")


# ---------------------------------------------------------------------------
# canonical form

def canonical_form(cg: ColouredGraph) -> tuple:
    """Colour-stable canonical key: iterated neighbourhood refinement,
    then deterministic individualisation.  Complete for the graphs
    certificates name in practice; refinement-equivalent non-automorphic
    vertices may defeat it, which is why certificates carry explicit
    vertex names everywhere except the root comparison."""
    n = cg.host.n
    adj = cg.host.adjacency
    labels = list(cg.sigma)

    def refine(base: list) -> list[int]:
        cur = base[:]
        for _ in range(n):
            sig = [
                (cur[v], tuple(sorted(cur[w] for w in adj[v]))) for v in range(n)
            ]
            ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
            nxt = [ranks[s] for s in sig]
            if nxt == cur:
                break
            cur = nxt
        return cur

    cur = refine(labels)
    order: list[int] = []
    placed = [False] * n
    while len(order) < n:
        cells: dict[int, list[int]] = {}
        for v in range(n):
            if not placed[v]:
                cells.setdefault(cur[v], []).append(v)
        label, members = min(cells.items())
        v = members[0]
        placed[v] = True
        order.append(v)
        # individualise and re-refine
        cur = refine([(cur[u], 1 if u == v else 0) for u in range(n)])
    pos = {v: i for i, v in enumerate(order)}
    edges = tuple(sorted(tuple(sorted((pos[u], pos[v]))) for u, v in cg.host.edges))
    sigma = tuple(cg.sigma[v] for v in order)
    return (n, edges, sigma)


def colour_isomorphic(a: ColouredGraph, b: ColouredGraph) -> bool:
    return a.pattern == b.pattern and canonical_form(a) == canonical_form(b)


# ---------------------------------------------------------------------------
# certificate structure

@dataclass
class CertNode:
    node_id: str
    kind: str
    params: dict
    children: list["CertNode"]
    output: ColouredGraph

    def walk(self) -> Iterable["CertNode"]:
        for child in self.children:
            yield from child.walk()
        yield self


@dataclass
class AbundanceCertificate:
    pattern: Graph
    target: ColouredGraph
    root: CertNode

    def to_json(self) -> dict:
        def node_json(node: CertNode) -> dict:
            return {
                "id": node.node_id,
                "kind": node.kind,
                "params": node.params,
                "children": [node_json(c) for c in node.children],
                "output": {
                    "n": node.output.host.n,
                    "edges": sorted(list(e) for e in node.output.host.edges),
                    "sigma": list(node.output.sigma),
                },
            }

        return {
            "pattern": self.pattern.to_json(),
            "target": {
                "n": self.target.host.n,
                "edges": sorted(list(e) for e in self.target.host.edges),
                "sigma": list(self.target.sigma),
            },
            "root": node_json(self.root),
        }

    @staticmethod
    def from_json(obj: Mapping) -> "AbundanceCertificate":
        pattern = Graph.from_json(obj["pattern"])

        def graph_of(o: Mapping) -> ColouredGraph:
            return ColouredGraph(
                Graph.from_edges(int(o["n"]), o["edges"]),
                pattern,
                tuple(int(c) for c in o["sigma"]),
            )

        def node_of(o: Mapping) -> CertNode:
            return CertNode(
                str(o["id"]),
                str(o["kind"]),
                dict(o["params"]),
                [node_of(c) for c in o["children"]],
                graph_of(o["output"]),
            )

        return AbundanceCertificate(pattern, graph_of(obj["target"]), node_of(obj["root"]))


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    node_id: Optional[str] = None
    reason: Optional[str] = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "node": self.node_id, "reason": self.reason}


class _StepError(Exception):
    pass


# ---------------------------------------------------------------------------
# step replay

def replay_atom(pattern: Graph, declared: ColouredGraph) -> ColouredGraph:
    if declared.host.m > 1:
        raise _StepError(f"atom has {declared.host.m} edges, at most one allowed")
    return declared


def replay_peel(pattern: Graph, child: ColouredGraph, params: Mapping) -> ColouredGraph:
    attach = [int(v) for v in params["attach"]]
    colour = int(params["colour"])
    if len(set(attach)) != len(attach):
        raise _StepError("attachment set has repeats")
    if any(not 0 <= v < child.host.n for v in attach):
        raise _StepError("attachment vertex outside child graph")
    if not 0 <= colour < pattern.n:
        raise _StepError("peel colour outside pattern")
    if attach:
        shared = {child.sigma[v] for v in attach}
        if len(shared) != 1:
            raise _StepError(f"attachment set spans colours {sorted(shared)}")
        base = shared.pop()
        if not pattern.has_edge(colour, base):
            raise _StepError(f"colour {colour} not pattern-adjacent to {base}")
    new = child.host.n
    edges = set(child.host.edges) | {(min(v, new), max(v, new)) for v in attach}
    return ColouredGraph(
        Graph(new + 1, frozenset(edges)), pattern, child.sigma + (colour,)
    )


def replay_glue(
    pattern: Graph, base: ColouredGraph, other: ColouredGraph, params: Mapping
) -> ColouredGraph:
    u, v = (int(x) for x in params["edge"])
    u_set = [int(x) for x in params["u_set"]]
    v_set = [int(x) for x in params["v_set"]]
    if not base.host.has_edge(u, v):
        raise _StepError(f"({u},{v}) is not an edge of the base graph")
    if not u_set or not v_set:
        raise _StepError("identification sets must be nonempty")
    for name, vs, anchor in (("u_set", u_set, u), ("v_set", v_set, v)):
        if len(set(vs)) != len(vs):
            raise _StepError(f"{name} has repeats")
        if any(not 0 <= x < other.host.n for x in vs):
            raise _StepError(f"{name} vertex outside the glued graph")
        want = base.sigma[anchor]
        got = {other.sigma[x] for x in vs}
        if got != {want}:
            raise _StepError(f"{name} colours {sorted(got)} differ from {want}")
    # base keeps its vertices except u, v (relabelled by sorted order);
    # the glued graph is appended, its u_set/v_set members acting as the
    # copies of u and v
    keep = [x for x in range(base.host.n) if x not in (u, v)]
    relabel = {x: i for i, x in enumerate(keep)}
    off = len(keep)
    edges: set[Edge] = set()
    for a, b in base.host.edges:
        if (a, b) == (min(u, v), max(u, v)):
            continue
        ends = []
        for x in (a, b):
            if x == u:
                ends.append([off + y for y in u_set])
            elif x == v:
                ends.append([off + y for y in v_set])
            else:
                ends.append([relabel[x]])
        for p in ends[0]:
            for q in ends[1]:
                edges.add((min(p, q), max(p, q)))
    for a, b in other.host.edges:
        edges.add((off + a, off + b))
    sigma = tuple(base.sigma[x] for x in keep) + other.sigma
    return ColouredGraph(Graph(off + other.host.n, frozenset(edges)), pattern, sigma)


def replay_join(
    pattern: Graph, left: ColouredGraph, right: ColouredGraph, params: Mapping
) -> ColouredGraph:
    a = int(params["a"])
    b = int(params["b"])
    a2 = int(params["a_prime"])
    if not pattern.has_edge(a, b):
        raise _StepError(f"({a},{b}) is not a pattern edge")
    if not pattern.has_edge(a, a2):
        raise _StepError(f"({a},{a2}) is not a pattern edge")
    off = left.host.n
    edges = set(left.host.edges)
    for p, q in right.host.edges:
        edges.add((off + p, off + q))
    for x in left.colour_class(a):
        for y in right.colour_class(a2):
            edges.add((min(x, off + y), max(x, off + y)))
    for x in left.colour_class(b):
        for y in right.colour_class(a):
            edges.add((min(x, off + y), max(x, off + y)))
    return ColouredGraph(
        Graph(off + right.host.n, frozenset(edges)), pattern, left.sigma + right.sigma
    )


def replay_subgraph(pattern: Graph, child: ColouredGraph, params: Mapping) -> ColouredGraph:
    keep_v = [int(x) for x in params["keep_vertices"]]
    if sorted(set(keep_v)) != sorted(keep_v):
        raise _StepError("kept vertices must be distinct")
    if any(not 0 <= x < child.host.n for x in keep_v):
        raise _StepError("kept vertex outside child graph")
    keep_v = sorted(keep_v)
    relabel = {x: i for i, x in enumerate(keep_v)}
    kept_edges = set()
    for a, b in params["keep_edges"]:
        e = (min(int(a), int(b)), max(int(a), int(b)))
        if e not in child.host.edges:
            raise _StepError(f"kept edge {e} not in child graph")
        if e[0] not in relabel or e[1] not in relabel:
            raise _StepError(f"kept edge {e} loses an endpoint")
        kept_edges.add((relabel[e[0]], relabel[e[1]]))
    sigma = tuple(child.sigma[x] for x in keep_v)
    return ColouredGraph(Graph(len(keep_v), frozenset(kept_edges)), pattern, sigma)


def replay_blowup(pattern: Graph, child: ColouredGraph, params: Mapping) -> ColouredGraph:
    from .graphs import blow_up

    sizes = [int(s) for s in params["sizes"]]
    if len(sizes) != child.host.n:
        raise _StepError("one size per child vertex required")
    if any(s <= 0 for s in sizes):
        raise _StepError("blow-up sizes must be positive")
    return blow_up(child, sizes)


_ARITY = {"atom": 0, "peel": 1, "glue": 2, "join": 2, "subgraph": 1, "blowup": 1}


def _replay_node(pattern: Graph, node: CertNode) -> ColouredGraph:
    if node.kind not in _ARITY:
        raise _StepError(f"unknown step kind {node.kind!r}")
    if len(node.children) != _ARITY[node.kind]:
        raise _StepError(
            f"{node.kind} expects {_ARITY[node.kind]} children, has {len(node.children)}"
        )
    outs = [c.output for c in node.children]
    if node.kind == "atom":
        return replay_atom(pattern, node.output)
    if node.kind == "peel":
        return replay_peel(pattern, outs[0], node.params)
    if node.kind == "glue":
        return replay_glue(pattern, outs[0], outs[1], node.params)
    if node.kind == "join":
        return replay_join(pattern, outs[0], outs[1], node.params)
    if node.kind == "subgraph":
        return replay_subgraph(pattern, outs[0], node.params)
    return replay_blowup(pattern, outs[0], node.params)


def _expand_join(pattern: Graph, node: CertNode) -> ColouredGraph:
    """Replay a join as two peels plus a glue; used for cross-checking."""
    left, right = node.children[0].output, node.children[1].output
    a = int(node.params["a"])
    b = int(node.params["b"])
    a2 = int(node.params["a_prime"])
    step1 = replay_peel(pattern, left, {"attach": list(left.colour_class(b)), "colour": a})
    v_new = left.host.n
    step2 = replay_peel(
        pattern,
        step1,
        {"attach": [v_new] + list(left.colour_class(a)), "colour": a2},
    )
    u_new = step1.host.n
    u_set = list(right.colour_class(a2))
    v_set = list(right.colour_class(a))
    glued = replay_glue(
        pattern, step2, right, {"edge": [u_new, v_new], "u_set": u_set, "v_set": v_set}
    )
    # the expansion leaves the peeled helper vertex v joined to colour-b
    # vertices and identified with the colour-a class, matching the join
    return glued


def verify_certificate(
    cert: AbundanceCertificate, expand_joins: bool = False
) -> VerificationResult:
    """Replay the derivation bottom-up.

    Every node must reconstruct exactly (labels included); the root is
    additionally compared with the target up to colour-preserving
    canonical relabelling.  The first failure is reported with its node.
    """
    ids = set()
    for node in cert.root.walk():
        if node.node_id in ids:
            return VerificationResult(False, node.node_id, "duplicate node id")
        ids.add(node.node_id)
        try:
            rebuilt = _replay_node(cert.pattern, node)
        except (_StepError, ValidationError) as exc:
            return VerificationResult(False, node.node_id, str(exc))
        if (
            rebuilt.host != node.output.host
            or rebuilt.sigma != node.output.sigma
            or node.output.pattern != cert.pattern
        ):
            return VerificationResult(
                False, node.node_id, "declared output differs from replayed step"
            )
        if expand_joins and node.kind == "join":
            try:
                expanded = _expand_join(cert.pattern, node)
            except (_StepError, ValidationError) as exc:
                return VerificationResult(False, node.node_id, f"join expansion failed: {exc}")
            if not colour_isomorphic(expanded, node.output):
                return VerificationResult(
                    False, node.node_id, "join expansion disagrees with declared output"
                )
    if not colour_isomorphic(cert.root.output, cert.target):
        return VerificationResult(False, cert.root.node_id, "root does not match target")
    return VerificationResult(True)


# ---------------------------------------------------------------------------
# certificate builders

class _IdGen:
    def __init__(self):
        self.counter = 0

    def next(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"


def _atom_node(cg: ColouredGraph, ids: _IdGen) -> CertNode:
    return CertNode(ids.next("n"), "atom", {}, [], cg)


def _peel_chain_cert(
    cg: ColouredGraph, removal_order: Sequence[int], ids: _IdGen
) -> tuple[CertNode, dict[int, int]]:
    """Certificate re-adding the removed vertices in reverse order.

    Returns the root node and the map from original vertex names to the
    certificate's labels.
    """
    removed = list(removal_order)
    staying = [v for v in range(cg.host.n) if v not in set(removed)]
    label = {v: i for i, v in enumerate(sorted(staying))}
    atom_graph = ColouredGraph(
        Graph.from_edges(
            len(staying),
            [
                (label[a], label[b])
                for a, b in cg.host.edges
                if a in label and b in label
            ],
        ),
        cg.pattern,
        tuple(cg.sigma[v] for v in sorted(staying)),
    )
    node = _atom_node(atom_graph, ids)
    current = set(staying)
    for v in reversed(removed):
        attach = [label[w] for w in cg.host.adjacency[v] if w in current]
        label[v] = len(current)
        current.add(v)
        params = {"attach": sorted(attach), "colour": cg.sigma[v]}
        out = replay_peel(cg.pattern, node.output, params)
        node = CertNode(ids.next("n"), "peel", params, [node], out)
    return node, label


def peel_order_search(
    cg: ColouredGraph, budget: int = 300_000
) -> Optional[AbundanceCertificate]:
    """Elimination order removing, at each step, a vertex whose remaining
    neighbourhood is monochromatic, down to an atom.

    Backtracking over removal choices with failure memoisation; exhaustive
    within the budget (ample for hosts up to 20 vertices), raising
    BudgetExhausted beyond it.  Returns the peel certificate, or None when
    no order exists.
    """
    n = cg.host.n
    adj = cg.host.adjacency
    failed: set[frozenset[int]] = set()
    states = 0

    def removable(remaining: frozenset[int]) -> list[int]:
        out = []
        for v in remaining:
            cols = {cg.sigma[w] for w in adj[v] if w in remaining}
            if len(cols) <= 1:
                out.append(v)
        return sorted(out)

    def edges_within(remaining: frozenset[int]) -> int:
        return sum(1 for a, b in cg.host.edges if a in remaining and b in remaining)

    def search(remaining: frozenset[int], order: list[int]) -> Optional[list[int]]:
        nonlocal states
        states += 1
        if states > budget:
            raise BudgetExhausted("peel search budget exhausted")
        if edges_within(remaining) <= 1:
            return order[:]
        if remaining in failed:
            return None
        for v in removable(remaining):
            order.append(v)
            res = search(remaining - {v}, order)
            if res is not None:
                return res
            order.pop()
        failed.add(remaining)
        return None

    order = search(frozenset(range(n)), [])
    if order is None:
        return None
    ids = _IdGen()
    root, _ = _peel_chain_cert(cg, order, ids)
    return AbundanceCertificate(cg.pattern, cg, root)


SPLIT_EXHAUSTIVE_EDGES = 20


def splittable_decompose(
    cg: ColouredGraph, budget: int = 200_000
) -> Optional[AbundanceCertificate]:
    """Recursive decomposition along colour-pair edge cut-sets.

    A piece with at most one edge is an atom; a piece all of whose edges
    span a single colour pair peels away vertex by vertex; otherwise some
    colour pair's edges must disconnect the piece, and the two sides are
    decomposed recursively and recombined by a join (all colour-pair
    edges) followed by a subgraph step trimming to the piece.  Memoised
    on edge sets; exhaustive below 20 edges, budget-bounded above.
    """
    pattern = cg.pattern
    ids = _IdGen()
    failed: set[frozenset[Edge]] = set()
    states = 0

    def piece_graph(verts: tuple[int, ...], edges: frozenset[Edge]) -> ColouredGraph:
        label = {v: i for i, v in enumerate(verts)}
        return ColouredGraph(
            Graph.from_edges(len(verts), [(label[a], label[b]) for a, b in edges]),
            pattern,
            tuple(cg.sigma[v] for v in verts),
        )

    def components_after(verts, edges, removed) -> list[tuple[int, ...]]:
        keep = edges - removed
        adj: dict[int, set[int]] = {v: set() for v in verts}
        for a, b in keep:
            adj[a].add(b)
            adj[b].add(a)
        seen = set()
        comps = []
        for s in verts:
            if s in seen:
                continue
            comp = []
            stack = [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(tuple(sorted(comp)))
        return comps

    def peel_order_for(piece: ColouredGraph) -> list[int]:
        # any order works on a two-coloured piece; peel highest labels first
        order = []
        remaining = set(range(piece.host.n))
        edges_left = set(piece.host.edges)
        while len(edges_left) > 1:
            v = max(remaining)
            order.append(v)
            remaining.remove(v)
            edges_left = {e for e in edges_left if v not in e}
        return order

    # decompose returns (node, vmap) where vmap[i] is the original vertex
    # sitting at position i of the node's output
    def decompose(
        verts: tuple[int, ...], edges: frozenset[Edge]
    ) -> Optional[tuple[CertNode, list[int]]]:
        nonlocal states
        states += 1
        if states > budget:
            raise BudgetExhausted("splittable search budget exhausted")
        piece = piece_graph(verts, edges)
        if len(edges) <= 1:
            return _atom_node(piece, ids), list(verts)
        if edges in failed:
            return None
        colour_pairs = sorted(
            {tuple(sorted((cg.sigma[a], cg.sigma[b]))) for a, b in edges}
        )
        if len(colour_pairs) == 1:
            # two-coloured piece: every vertex has a monochromatic
            # neighbourhood, so it peels down directly
            order = peel_order_for(piece)
            node, label = _peel_chain_cert(piece, order, ids)
            vmap = [0] * len(verts)
            for piece_v, cert_v in label.items():
                vmap[cert_v] = verts[piece_v]
            return node, vmap
        for a, b in colour_pairs:
            cut = frozenset(
                e for e in edges if tuple(sorted((cg.sigma[e[0]], cg.sigma[e[1]]))) == (a, b)
            )
            comps = components_after(verts, edges, cut)
            if len(comps) <= 1:
                continue
            for first in range(len(comps)):
                side1 = set(comps[first])
                side2 = [v for v in verts if v not in side1]
                if not side2:
                    continue
                crossing = {e for e in edges if (e[0] in side1) != (e[1] in side1)}
                if not crossing <= cut:
                    continue
                e1 = frozenset(e for e in edges if e[0] in side1 and e[1] in side1)
                e2 = frozenset(e for e in edges if e[0] not in side1 and e[1] not in side1)
                left = decompose(tuple(sorted(side1)), e1)
                if left is None:
                    continue
                right = decompose(tuple(sorted(side2)), e2)
                if right is None:
                    continue
                left_node, left_map = left
                right_node, right_map = right
                params = {"a": a, "b": b, "a_prime": b}
                joined = replay_join(pattern, left_node.output, right_node.output, params)
                join_node = CertNode(
                    ids.next("n"), "join", params, [left_node, right_node], joined
                )
                vmap = left_map + right_map
                pos = {orig: i for i, orig in enumerate(vmap)}
                wanted = sorted(
                    (min(pos[x], pos[y]), max(pos[x], pos[y])) for x, y in edges
                )
                sub_params = {
                    "keep_vertices": list(range(len(verts))),
                    "keep_edges": [list(e) for e in wanted],
                }
                out = replay_subgraph(pattern, joined, sub_params)
                sub_node = CertNode(ids.next("n"), "subgraph", sub_params, [join_node], out)
                return sub_node, vmap
        failed.add(edges)
        return None

    result = decompose(tuple(range(cg.host.n)), frozenset(cg.host.edges))
    if result is None:
        return None
    root, _ = result
    cert = AbundanceCertificate(pattern, cg, root)
    assert verify_certificate(cert).ok
    return cert


# ---------------------------------------------------------------------------
# doubling construction

def double_along_edge(cg: ColouredGraph, edge: Edge) -> ColouredGraph:
    """Disjoint union of two copies, cross-joining the two colour classes
    of the given pattern edge between the copies."""
    a, b = int(edge[0]), int(edge[1])
    if not cg.pattern.has_edge(a, b):
        raise ValidationError(f"({a},{b}) is not a pattern edge")
    if not cg.is_surjective():
        raise NotSurjective("doubling requires a surjective colouring")
    n = cg.host.n
    edges = set(cg.host.edges)
    for p, q in cg.host.edges:
        edges.add((n + p, n + q))
    for x in cg.colour_class(a):
        for y in cg.colour_class(b):
            edges.add((x, n + y))
            edges.add((y, n + x))
    return ColouredGraph(Graph(2 * n, frozenset(edges)), cg.pattern, cg.sigma * 2)


HM_MAX_VERTICES = 10**6


def build_hm(seed: ColouredGraph, m: int) -> ColouredGraph:
    """Iterate the doubling along the pattern's edges in lexicographic
    order, cycling; m = 0 returns the seed."""
    if m < 0:
        raise ValidationError("m must be nonnegative")
    if seed.host.n * (2**m) > HM_MAX_VERTICES:
        raise ScaleExceeded(f"2^{m} * {seed.host.n} vertices exceeds the size cap")
    if not seed.is_surjective():
        raise NotSurjective("doubling requires a surjective colouring")
    pattern_edges = sorted(seed.pattern.edges)
    cur = seed
    for j in range(m):
        cur = double_along_edge(cur, pattern_edges[j % len(pattern_edges)])
    return cur


# ---------------------------------------------------------------------------
# shipped fixtures

def load_fixture(name: str) -> AbundanceCertificate:
    text = resources.files("cyceq").joinpath(f"fixtures/{name}").read_text()
    return AbundanceCertificate.from_json(json.loads(text))
