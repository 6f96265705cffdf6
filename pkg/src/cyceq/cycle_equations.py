"""Cycle-equation systems of coloured graphs.

Fixing an injection c from pattern vertices to positive integers, each
cycle v_1..v_l of the host induces the telescoping equation whose
coefficient on edge v_i v_(i+1) is c(sigma(v_(i+1))) - c(sigma(v_i)).
The module builds these systems, decides convex-combination existence by
reduction to single cycles, decides the symmetry/level-map equivalence,
classifies coloured cycles, and searches bounded linear combinations for
an equation of genus one.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import equations as eqmod
from .equations import Equation
from .errors import NotACycle, ScaleExceeded, Truncated, ValidationError
from .graphs import (
    ColouredGraph,
    CycleList,
    Edge,
    Graph,
    colour_hom_to_p3inf,
    enumerate_cycles,
    has_increasing_cycle,
    wrap_of_cycle,
)

IDENTITY_K3 = (1, 2, 3)


def _check_cycle(g: Graph, cycle: Sequence[int]) -> tuple[int, ...]:
    cyc = tuple(int(v) for v in cycle)
    if len(cyc) < 3 or len(set(cyc)) != len(cyc):
        raise NotACycle("cycle must visit at least 3 distinct vertices")
    for i, u in enumerate(cyc):
        if not g.has_edge(u, cyc[(i + 1) % len(cyc)]):
            raise NotACycle(f"({u},{cyc[(i + 1) % len(cyc)]}) is not an edge")
    return cyc


@dataclass(frozen=True)
class CycleEquation:
    """Equation attached to one cycle; edge variable order is retained."""

    cycle: tuple[int, ...]
    edges: tuple[Edge, ...]
    equation: Equation

    def to_json(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "edges": [list(e) for e in self.edges],
            "coeffs": self.equation.to_json(),
        }


def build_cycle_equation(
    cycle: Sequence[int], cg: ColouredGraph, ordering: Sequence[int]
) -> CycleEquation:
    """Coefficients c(sigma(next)) - c(sigma(current)) along the cycle."""
    cyc = _check_cycle(cg.host, cycle)
    coeffs = []
    edges = []
    for i, u in enumerate(cyc):
        v = cyc[(i + 1) % len(cyc)]
        coeffs.append(ordering[cg.sigma[v]] - ordering[cg.sigma[u]])
        edges.append((u, v) if u < v else (v, u))
    return CycleEquation(cyc, tuple(edges), eqmod.validate(coeffs))


@dataclass(frozen=True)
class CycleEquationSystem:
    graph: ColouredGraph
    ordering: tuple[int, ...]
    members: tuple[CycleEquation, ...]
    source: str  # "all-cycles" | "basis"
    truncated: bool


def build_system(
    cg: ColouredGraph,
    ordering: Sequence[int],
    source: str = "all-cycles",
    max_count: int = 10**5,
    max_len: int = 20,
) -> CycleEquationSystem:
    from .graphs import cycle_basis

    ordering = tuple(ordering)
    if source == "basis":
        cycles = [tuple(c) for c in cycle_basis(cg.host)]
        truncated = False
    else:
        listing = enumerate_cycles(cg.host, max_count=max_count, max_len=max_len)
        cycles = sorted(listing.cycles, key=lambda c: (len(c), c))
        truncated = listing.truncated
    members = tuple(build_cycle_equation(c, cg, ordering) for c in cycles)
    return CycleEquationSystem(cg, ordering, members, source, truncated)


def all_orderings(pattern_size: int) -> list[tuple[int, ...]]:
    """All injections onto {1..|F|}; signs of cycle-equation coefficients
    depend only on the relative order."""
    return [tuple(p) for p in itertools.permutations(range(1, pattern_size + 1))]


def exists_convex_combination(
    cg: ColouredGraph,
    ordering: Sequence[int],
    max_count: int = 10**5,
    max_len: int = 20,
) -> Optional[tuple[int, ...]]:
    """Cycle whose cycle-equation is convex, or None meaning no linear
    combination of the system is convex.

    Single cycles suffice: a convex combination forces a cycle along
    which the ordered colours strictly increase except at one step, and
    that cycle's own equation is convex.  Raises Truncated when the
    enumeration was capped and nothing was found.
    """
    witness = has_increasing_cycle(cg, tuple(ordering), max_count=max_count, max_len=max_len)
    if witness is not None:
        eq = build_cycle_equation(witness, cg, tuple(ordering)).equation
        assert eqmod.is_convex(eq)
    return witness


@dataclass(frozen=True)
class SymmetryReport:
    all_symmetric: bool
    wrapped_cycle: Optional[tuple[int, ...]]
    counterexample: Optional[CycleEquation]


def eqs_all_symmetric(cg: ColouredGraph) -> SymmetryReport:
    """Whether every equation of the system (over every injection) is
    symmetric; equivalent to the level-map existing.  On failure returns
    a wrapped cycle and its non-symmetric equation at the identity
    ordering."""
    res = colour_hom_to_p3inf(cg)
    if res.exists:
        return SymmetryReport(True, None, None)
    cyc_eq = build_cycle_equation(res.wrapped_cycle, cg, IDENTITY_K3)
    assert not eqmod.is_symmetric(cyc_eq.equation)
    return SymmetryReport(False, res.wrapped_cycle, cyc_eq)


@dataclass(frozen=True)
class CycleClassification:
    abundant: bool
    # abundant case: positions (i, j) on the cycle carrying the same colour
    repeat_pair: Optional[tuple[int, int]]
    # non-abundant case: ordering under which the cycle-equation is convex
    convex_ordering: Optional[tuple[int, ...]]
    convex_equation: Optional[Equation]


def _cycle_sequence(g: Graph) -> tuple[int, ...]:
    if g.n < 3 or g.m != g.n or any(g.degree(v) != 2 for v in range(g.n)):
        raise NotACycle("host is not a single cycle")
    seq = [0]
    prev = -1
    while len(seq) < g.n:
        nxt = min(w for w in g.adjacency[seq[-1]] if w != prev)
        prev = seq[-1]
        seq.append(nxt)
    if not g.has_edge(seq[-1], seq[0]):
        raise NotACycle("host is not a single cycle")
    return tuple(seq)


def classify_cycle(cg: ColouredGraph) -> CycleClassification:
    """Dichotomy for a coloured cycle: abundant exactly when some colour
    repeats along it; otherwise the rainbow ordering makes its equation
    convex."""
    seq = _cycle_sequence(cg.host)
    seen: dict[int, int] = {}
    for pos, v in enumerate(seq):
        col = cg.sigma[v]
        if col in seen:
            return CycleClassification(True, (seq[seen[col]], v), None, None)
        seen[col] = pos
    # all colours distinct: order them along the cycle
    ordering = [0] * cg.pattern.n
    nxt = 1
    for v in seq:
        ordering[cg.sigma[v]] = nxt
        nxt += 1
    for col in range(cg.pattern.n):
        if ordering[col] == 0:
            ordering[col] = nxt
            nxt += 1
    eq = build_cycle_equation(seq, cg, ordering).equation
    assert eqmod.is_convex(eq)
    return CycleClassification(False, None, tuple(ordering), eq)


@dataclass(frozen=True)
class CombinationWitness:
    """Integer combination of cycle-equations with a verified property."""

    cycles: tuple[tuple[int, ...], ...]
    multipliers: tuple[int, ...]
    edges: tuple[Edge, ...]
    equation: Equation
    property_claimed: str  # "genus-one" | "convex"
    genus_value: Optional[int]
    convex: bool

    def to_json(self) -> dict:
        return {
            "cycles": [list(c) for c in self.cycles],
            "multipliers": list(self.multipliers),
            "edges": [list(e) for e in self.edges],
            "coeffs": self.equation.to_json(),
            "property": self.property_claimed,
            "genus": self.genus_value,
            "convex": self.convex,
        }


def combine_cycle_equations(
    members: Sequence[CycleEquation], multipliers: Sequence[int]
) -> tuple[tuple[Edge, ...], tuple[int, ...]]:
    """Sum multiplier-weighted equations over the shared edge variables,
    dropping cancelled edges."""
    acc: dict[Edge, int] = defaultdict(int)
    for ce, lam in zip(members, multipliers):
        for e, a in zip(ce.edges, ce.equation.coeffs):
            acc[e] += lam * a
    edges = tuple(sorted(e for e, a in acc.items() if a != 0))
    return edges, tuple(acc[e] for e in edges)


def _proper_zero_sum_subset_exists(vals: Sequence[int]) -> bool:
    """Saturating subset-count DP; equivalent to genus >= 2 for a
    zero-sum multiset of nonzero values."""
    if len(vals) <= 2:
        return False
    counts: dict[int, int] = {0: 1}
    for v in vals:
        new = defaultdict(int)
        for s, c in counts.items():
            new[s] = min(3, new[s] + c)
            new[s + v] = min(3, new[s + v] + c)
        counts = dict(new)
    return counts.get(0, 0) >= 3


def _verify_genus_one(coeffs: Sequence[int]) -> tuple[bool, Optional[int]]:
    """Authoritative genus-one check through the equations module."""
    if len(coeffs) <= eqmod.GENUS_MAX_VARIABLES:
        g = eqmod.genus(eqmod.validate(coeffs)).genus
        return g == 1, g
    return not eqmod.genus_at_least_two(tuple(coeffs)), None


def _coprime_multiplier_pairs(bound: int) -> list[tuple[int, int]]:
    """Representatives of multiplier pairs up to scaling and global sign."""
    out = []
    for a in range(1, bound + 1):
        for b in range(-bound, bound + 1):
            if b != 0 and math.gcd(a, abs(b)) == 1:
                out.append((a, b))
    return out


class _PairSearchKernel:
    """Vectorised screen for two-cycle combinations.

    Rows of W hold the cycle-equation coefficients over the edge
    variables.  A combination whose value multiset contains some value
    and its negation has genus >= 2 outright (the pair is a proper
    zero-sum subset), which kills almost every candidate cheaply; the
    survivors go through the exact subset DP.
    """

    def __init__(self, w_matrix: np.ndarray):
        self.w = w_matrix.astype(np.int32)
        self.count, self.m = self.w.shape

    def _screen(self, flat: np.ndarray, offset: int) -> np.ndarray:
        present = np.bitwise_or.reduce(
            np.int64(1) << (flat.astype(np.int64) + offset), axis=1
        )
        bad = np.zeros(present.shape[0], dtype=bool)
        for v in range(1, offset + 1):
            both = ((present >> (v + offset)) & (present >> (offset - v))) & 1
            bad |= both.astype(bool)
        support = (flat != 0).sum(axis=1)
        return np.nonzero(~bad & (support >= 2))[0]

    def singles(self) -> Iterator[tuple[int, np.ndarray]]:
        offset = int(np.abs(self.w).max(initial=1))
        for idx in self._screen(self.w, offset):
            yield int(idx), self.w[idx]

    def pairs(
        self, lam_pairs: Sequence[tuple[int, int]], block: int = 48
    ) -> Iterator[tuple[int, int, int, int, np.ndarray]]:
        wmax = int(np.abs(self.w).max(initial=1))
        lmax = max(max(abs(a), abs(b)) for a, b in lam_pairs)
        offset = 2 * wmax * lmax
        for i0 in range(0, self.count, block):
            wi = self.w[i0 : min(i0 + block, self.count)]
            for l1, l2 in lam_pairs:
                mat = l1 * wi[:, None, :] + l2 * self.w[None, :, :]
                flat = mat.reshape(-1, self.m)
                for fidx in self._screen(flat, offset):
                    bi, j = divmod(int(fidx), self.count)
                    i = i0 + bi
                    if j <= i:
                        continue
                    yield i, j, l1, l2, flat[fidx]


GENUS_ONE_DEFAULT_T = 2
GENUS_ONE_DEFAULT_L = 2


def genus_one_combination_search(
    cg: ColouredGraph,
    ordering: Sequence[int],
    t: int = GENUS_ONE_DEFAULT_T,
    bound: int = GENUS_ONE_DEFAULT_L,
    max_count: int = 10**5,
    max_len: int = 20,
    system: Optional[CycleEquationSystem] = None,
) -> Optional[CombinationWitness]:
    """Bounded search for a genus-one integer combination of at most t
    cycle-equations with multipliers in [-bound, bound] minus zero.

    Returns the first witness in a fixed deterministic order, or None
    meaning none exists within these bounds (not a nonexistence proof).
    Raises Truncated when the cycle list itself was capped.
    """
    if t < 1 or bound < 1:
        raise ValidationError("bounds t and L must be positive")
    if t > 2:
        raise ScaleExceeded("combination search implemented for t <= 2")
    if system is None:
        system = build_system(cg, ordering, max_count=max_count, max_len=max_len)
    if system.truncated:
        raise Truncated("cycle enumeration was capped; combination search inconclusive")
    members = system.members
    if not members:
        return None

    edge_index = {}
    for ce in members:
        for e in ce.edges:
            edge_index.setdefault(e, len(edge_index))
    edge_list = sorted(edge_index)
    edge_index = {e: i for i, e in enumerate(edge_list)}
    w = np.zeros((len(members), len(edge_list)), dtype=np.int32)
    for r, ce in enumerate(members):
        for e, a in zip(ce.edges, ce.equation.coeffs):
            w[r, edge_index[e]] += a

    def make_witness(indices, lams, vec) -> Optional[CombinationWitness]:
        vals = [int(x) for x in vec if x]
        if len(vals) < 2 or sum(vals) != 0:
            return None
        ok, gval = _verify_genus_one(vals)
        if not ok:
            return None
        edges, coeffs = combine_cycle_equations(
            [members[i] for i in indices], list(lams)
        )
        eq = eqmod.validate(coeffs)
        return CombinationWitness(
            cycles=tuple(members[i].cycle for i in indices),
            multipliers=tuple(lams),
            edges=edges,
            equation=eq,
            property_claimed="genus-one",
            genus_value=gval,
            convex=eqmod.is_convex(eq),
        )

    kernel = _PairSearchKernel(w)
    for idx, row in kernel.singles():
        wit = make_witness((idx,), (1,), row)
        if wit is not None:
            return wit
    if t >= 2 and len(members) >= 2:
        lam_pairs = _coprime_multiplier_pairs(bound)
        for i, j, l1, l2, vec in kernel.pairs(lam_pairs):
            if _proper_zero_sum_subset_exists([int(x) for x in vec if x]):
                continue
            wit = make_witness((i, j), (l1, l2), vec)
            if wit is not None:
                return wit
    return None


@dataclass(frozen=True)
class ColouringVerdict:
    colouring: tuple[int, ...]
    verdict: str
    witness: Optional[dict]

    def to_json(self) -> dict:
        return {
            "colouring": list(self.colouring),
            "verdict": self.verdict,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class ColouringReport:
    records: tuple[ColouringVerdict, ...]
    check: str
    bounds: dict
    escalation: tuple[tuple[int, ...], ...]  # colourings with no witness in bounds

    def summary_json(self) -> dict:
        counts: dict[str, int] = defaultdict(int)
        for r in self.records:
            counts[r.verdict] += 1
        return {
            "summary": True,
            "check": self.check,
            "bounds": self.bounds,
            "classes": len(self.records),
            "verdicts": dict(sorted(counts.items())),
            "escalation": [list(c) for c in self.escalation],
        }


CHECK_ALL_MAX_VERTICES = 18


def proper_k3_colourings(g: Graph, reduce_symmetry: bool = True) -> Iterator[tuple[int, ...]]:
    """Proper 3-colourings in deterministic order.

    With symmetry reduction each class of the 6 colour permutations is
    produced once, by allowing a vertex (in decreasing-degree order) only
    colours up to one above the maximum used so far.
    """
    if g.n > CHECK_ALL_MAX_VERTICES:
        raise ScaleExceeded(f"colouring enumeration limited to {CHECK_ALL_MAX_VERTICES} vertices")
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    colour = [-1] * g.n
    adj = g.adjacency

    def rec(i: int, max_used: int) -> Iterator[tuple[int, ...]]:
        if i == g.n:
            yield tuple(colour)
            return
        v = order[i]
        top = 3 if not reduce_symmetry else min(max_used + 2, 3)
        for c in range(top):
            if all(colour[w] != c for w in adj[v]):
                colour[v] = c
                yield from rec(i + 1, max(max_used, c))
                colour[v] = -1

    yield from rec(0, -1)


def check_all_colourings(
    g: Graph,
    check: str = "genus1",
    ordering: Sequence[int] = IDENTITY_K3,
    orderings: Optional[Sequence[Sequence[int]]] = None,
    t: int = GENUS_ONE_DEFAULT_T,
    bound: int = GENUS_ONE_DEFAULT_L,
    reduce_symmetry: bool = True,
    max_count: int = 10**5,
    max_len: int = 20,
) -> ColouringReport:
    """Run a per-colouring check over every proper K3-colouring of g.

    check is one of "genus1" (bounded combination search), "convex"
    (single-cycle reduction, over the given orderings or all 6), or
    "symmetric" (level-map test).  Cycles are enumerated once and shared
    across colourings.
    """
    from .graphs import K3

    listing = enumerate_cycles(g, max_count=max_count, max_len=max_len)
    if listing.truncated:
        raise Truncated("cycle enumeration was capped; check-all would be inconclusive")
    cycles = sorted(listing.cycles, key=lambda c: (len(c), c))

    records = []
    escalation = []
    for sigma in proper_k3_colourings(g, reduce_symmetry=reduce_symmetry):
        cg = ColouredGraph(g, K3, sigma)
        if check == "genus1":
            system = CycleEquationSystem(
                cg,
                tuple(ordering),
                tuple(build_cycle_equation(c, cg, tuple(ordering)) for c in cycles),
                "all-cycles",
                False,
            )
            wit = genus_one_combination_search(
                cg, ordering, t=t, bound=bound, system=system
            )
            if wit is None:
                records.append(ColouringVerdict(sigma, "none-within-bounds", None))
                escalation.append(sigma)
            else:
                records.append(ColouringVerdict(sigma, "witness-found", wit.to_json()))
        elif check == "convex":
            use = [tuple(o) for o in orderings] if orderings else all_orderings(3)
            found = None
            for o in use:
                cyc = exists_convex_combination(cg, o, max_count=max_count, max_len=max_len)
                if cyc is not None:
                    found = {"ordering": list(o), "cycle": list(cyc)}
                    break
            if found is None:
                records.append(ColouringVerdict(sigma, "no-convex-combination", None))
            else:
                records.append(ColouringVerdict(sigma, "convex-cycle-found", found))
        elif check == "symmetric":
            rep = eqs_all_symmetric(cg)
            if rep.all_symmetric:
                records.append(ColouringVerdict(sigma, "all-symmetric", None))
            else:
                records.append(
                    ColouringVerdict(
                        sigma,
                        "wrapped",
                        {
                            "wrapped_cycle": list(rep.wrapped_cycle),
                            "equation": rep.counterexample.equation.to_json(),
                        },
                    )
                )
        else:
            raise ValidationError(f"unknown check {check!r}")
    bounds = {
        "t": t,
        "L": bound,
        "ordering": list(ordering),
        "symmetry_reduction": reduce_symmetry,
        "max_count": max_count,
        "max_len": max_len,
    }
    return ColouringReport(tuple(records), check, bounds, tuple(escalation))
