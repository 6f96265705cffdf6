"""Translation-invariant integer equations and their classification.

An equation is a list of nonzero integer coefficients a_1..a_k with
a_1 + ... + a_k = 0, read as a_1*x_1 + ... + a_k*x_k = 0.  This module
classifies equations (genus, convexity, symmetry), classifies candidate
solutions, and computes exact avoidance numbers on [N] by branch and
bound at desk scale.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    CoefficientTooLarge,
    LengthMismatch,
    NonzeroSum,
    ScaleExceeded,
    TooManyVariables,
    TooShort,
    ZeroCoefficient,
)

COEFF_BOUND = 2**31
GENUS_MAX_VARIABLES = 24


@dataclass(frozen=True)
class Equation:
    """Validated coefficient tuple; construct through validate()."""

    coeffs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.coeffs)

    def negated(self) -> "Equation":
        return Equation(tuple(-a for a in self.coeffs))

    def to_json(self) -> list[int]:
        return list(self.coeffs)


def validate(coeffs: Iterable[int]) -> Equation:
    """Check the equation invariants and wrap the coefficients.

    Raises TooShort, ZeroCoefficient, NonzeroSum or CoefficientTooLarge.
    """
    cs = tuple(int(a) for a in coeffs)
    if len(cs) < 2:
        raise TooShort(f"need at least 2 coefficients, got {len(cs)}")
    for i, a in enumerate(cs):
        if a == 0:
            raise ZeroCoefficient(f"coefficient {i} is zero")
        if abs(a) > COEFF_BOUND:
            raise CoefficientTooLarge(f"|a_{i}| = {abs(a)} exceeds 2^31")
    if sum(cs) != 0:
        raise NonzeroSum(f"coefficients sum to {sum(cs)}, not 0")
    return Equation(cs)


@dataclass(frozen=True)
class ZeroSumPartition:
    """Partition of coefficient indices into zero-sum parts."""

    parts: tuple[tuple[int, ...], ...]

    def check(self, eq: Equation) -> bool:
        seen = sorted(i for part in self.parts for i in part)
        if seen != list(range(eq.k)):
            return False
        return all(part and sum(eq.coeffs[i] for i in part) == 0 for part in self.parts)


@dataclass(frozen=True)
class GenusResult:
    genus: int
    witness: ZeroSumPartition


def genus(eq: Equation) -> GenusResult:
    """Maximum number of parts in a zero-sum partition of the indices.

    Bitmask DP over subsets: f(S) is the best part count for index set S,
    taking as first part a zero-sum subset of S containing S's lowest
    index.  Exact, O(3^k) worst case; k is capped at 24.
    """
    k = eq.k
    if k > GENUS_MAX_VARIABLES:
        raise TooManyVariables(f"k = {k} exceeds the genus search bound {GENUS_MAX_VARIABLES}")
    full = (1 << k) - 1
    sums = [0] * (1 << k)
    for i in range(k):
        bit = 1 << i
        a = eq.coeffs[i]
        for s in range(bit):
            sums[bit | s] = sums[s] + a
    f = [-1] * (1 << k)
    choice = [0] * (1 << k)
    f[0] = 0
    for s in range(1, full + 1):
        low = s & (-s)
        t = s
        best, best_t = -1, 0
        while t:
            if (t & low) and sums[t] == 0 and f[s ^ t] >= 0 and f[s ^ t] + 1 > best:
                best, best_t = f[s ^ t] + 1, t
            t = (t - 1) & s
        f[s], choice[s] = best, best_t
    parts = []
    s = full
    while s:
        t = choice[s]
        parts.append(tuple(i for i in range(k) if t >> i & 1))
        s ^= t
    result = GenusResult(f[full], ZeroSumPartition(tuple(parts)))
    assert result.genus >= 1 and result.witness.check(eq)
    return result


def genus_at_least_two(coeffs: Sequence[int]) -> bool:
    """Whether some proper nonempty index subset has zero coefficient sum.

    Equivalent to genus >= 2 (the complement of such a subset also sums
    to zero).  Meet-in-the-middle, so usable far beyond the k <= 24 cap
    of the full genus computation.
    """
    k = len(coeffs)
    if k <= 2:
        return False
    half = k // 2
    left, right = coeffs[:half], coeffs[half:]
    # sums of left subsets -> bitmask of sizes attaining each sum
    attain: dict[int, int] = defaultdict(int)
    for mask in range(1 << len(left)):
        s = 0
        m = mask
        size = 0
        while m:
            i = (m & -m).bit_length() - 1
            s += left[i]
            size += 1
            m &= m - 1
        attain[s] |= 1 << size
    for mask in range(1 << len(right)):
        s = 0
        m = mask
        size = 0
        while m:
            i = (m & -m).bit_length() - 1
            s += right[i]
            size += 1
            m &= m - 1
        sizes = attain.get(-s)
        if not sizes:
            continue
        # need total size in [1, k-1]
        lo = max(0, 1 - size)
        hi = (k - 1) - size
        if hi >= lo and (sizes >> lo) & ((1 << (hi - lo + 1)) - 1):
            return True
    return False


def is_convex(eq: Equation) -> bool:
    """All but one coefficient share a sign (either polarity)."""
    pos = sum(1 for a in eq.coeffs if a > 0)
    neg = eq.k - pos
    return min(pos, neg) == 1


def is_symmetric(eq: Equation) -> bool:
    """The coefficient multiset equals its own negation.

    Equivalent to the pairing form sum a_i x_i = sum a_i x_(l+i): such an
    equation pairs each a_i with -a_i, and conversely a self-negating
    multiset can be greedily matched into (a, -a) pairs.
    """
    c = Counter(eq.coeffs)
    return all(c[a] == c[-a] for a in c)


class SolutionClass(enum.Enum):
    NOT_A_SOLUTION = "not-a-solution"
    TRIVIAL = "trivial"
    NONTRIVIAL_WITH_REPEATS = "nontrivial-with-repeats"
    ALL_DISTINCT = "all-distinct"


def classify_solution(eq: Equation, x: Sequence[int]) -> SolutionClass:
    """Classify an assignment: a solution is trivial when every maximal
    block of equal values has zero coefficient sum."""
    if len(x) != eq.k:
        raise LengthMismatch(f"expected {eq.k} values, got {len(x)}")
    if sum(a * v for a, v in zip(eq.coeffs, x)) != 0:
        return SolutionClass.NOT_A_SOLUTION
    blocks: dict[int, int] = defaultdict(int)
    for a, v in zip(eq.coeffs, x):
        blocks[v] += a
    if len(blocks) == eq.k:
        return SolutionClass.ALL_DISTINCT
    if all(s == 0 for s in blocks.values()):
        return SolutionClass.TRIVIAL
    return SolutionClass.NONTRIVIAL_WITH_REPEATS


class AvoidanceMode(enum.Enum):
    DISTINCT_FREE = "distinct-free"      # forbids all-distinct solutions (R_E)
    NONTRIVIAL_FREE = "nontrivial-free"  # forbids any nontrivial solution (r_E)


_FORBIDDEN = {
    AvoidanceMode.DISTINCT_FREE: {SolutionClass.ALL_DISTINCT},
    AvoidanceMode.NONTRIVIAL_FREE: {
        SolutionClass.ALL_DISTINCT,
        SolutionClass.NONTRIVIAL_WITH_REPEATS,
    },
}


@dataclass(frozen=True)
class AvoidanceResult:
    n_max: int
    witness: tuple[int, ...]
    mode: AvoidanceMode


AVOIDANCE_MAX_N = 40
AVOIDANCE_MAX_K = 6


def _set_is_free(eq: Equation, values: Sequence[int], mode: AvoidanceMode) -> bool:
    forbidden = _FORBIDDEN[mode]
    for tup in itertools.product(values, repeat=eq.k):
        if classify_solution(eq, tup) in forbidden:
            return False
    return True


def _creates_forbidden(eq: Equation, chosen: list[int], x: int, mode: AvoidanceMode) -> bool:
    """Does adding x to chosen create a forbidden solution using x?

    Enumerates zero-sum k-tuples over chosen + {x} that use x at least
    once, pruning on achievable partial sums.  Tuples avoiding x were
    screened when their own last element was added.
    """
    values = chosen + [x]
    lo = min(values)
    hi = max(values)
    coeffs = eq.coeffs
    # suffix bounds on the remaining contribution
    suf_min = [0] * (eq.k + 1)
    suf_max = [0] * (eq.k + 1)
    for i in range(eq.k - 1, -1, -1):
        a = coeffs[i]
        suf_min[i] = suf_min[i + 1] + (a * lo if a > 0 else a * hi)
        suf_max[i] = suf_max[i + 1] + (a * hi if a > 0 else a * lo)
    forbidden = _FORBIDDEN[mode]
    distinct_only = mode is AvoidanceMode.DISTINCT_FREE

    tup = [0] * eq.k

    def rec(i: int, partial: int, used_x: bool) -> bool:
        if i == eq.k:
            if partial != 0 or not used_x:
                return False
            return classify_solution(eq, tup) in forbidden
        if not used_x and i == eq.k - 1:
            cand = [x]
        else:
            cand = values
        for v in cand:
            if distinct_only and v in tup[:i]:
                continue
            p = partial + coeffs[i] * v
            if p + suf_min[i + 1] > 0 or p + suf_max[i + 1] < 0:
                continue
            tup[i] = v
            if rec(i + 1, p, used_x or v == x):
                return True
        return False

    return rec(0, 0, False)


def brute_avoidance(eq: Equation, n: int, mode: AvoidanceMode) -> AvoidanceResult:
    """Exact maximum subset of [n] avoiding forbidden solutions, with witness.

    Branch and bound over elements 1..n; each candidate element is tested
    incrementally against the chosen prefix.
    """
    if n > AVOIDANCE_MAX_N or eq.k > AVOIDANCE_MAX_K:
        raise ScaleExceeded(f"brute_avoidance limited to N <= {AVOIDANCE_MAX_N}, k <= {AVOIDANCE_MAX_K}")
    best: list[int] = []
    chosen: list[int] = []

    def extend(next_val: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = chosen[:]
        if len(chosen) + (n - next_val + 1) <= len(best):
            return
        for x in range(next_val, n + 1):
            if len(chosen) + (n - x + 1) <= len(best):
                break
            if not _creates_forbidden(eq, chosen, x, mode):
                chosen.append(x)
                extend(x + 1)
                chosen.pop()

    extend(1)
    witness = tuple(best)
    assert _set_is_free(eq, witness, mode)
    return AvoidanceResult(len(witness), witness, mode)


COUNT_ENUMERATION_CAP = 10**8


def count_distinct_solutions(eq: Equation, values: Iterable[int]) -> int:
    """Exact number of ordered k-tuples of distinct elements of the set
    solving the equation."""
    vals = sorted(set(values))
    if len(vals) ** eq.k > COUNT_ENUMERATION_CAP:
        raise ScaleExceeded(f"|A|^k = {len(vals) ** eq.k} exceeds enumeration cap")
    if len(vals) < eq.k:
        return 0
    lo, hi = vals[0], vals[-1]
    coeffs = eq.coeffs
    suf_min = [0] * (eq.k + 1)
    suf_max = [0] * (eq.k + 1)
    for i in range(eq.k - 1, -1, -1):
        a = coeffs[i]
        suf_min[i] = suf_min[i + 1] + (a * lo if a > 0 else a * hi)
        suf_max[i] = suf_max[i + 1] + (a * hi if a > 0 else a * lo)
    used: set[int] = set()

    def rec(i: int, partial: int) -> int:
        if i == eq.k:
            return 1 if partial == 0 else 0
        total = 0
        for v in vals:
            if v in used:
                continue
            p = partial + coeffs[i] * v
            if p + suf_min[i + 1] > 0 or p + suf_max[i + 1] < 0:
                continue
            used.add(v)
            total += rec(i + 1, p)
            used.remove(v)
        return total

    return rec(0, 0)
