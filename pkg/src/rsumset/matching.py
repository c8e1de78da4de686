"""Distinct representative sums via bipartite matching.

Given A = (a_1, ..., a_n) and B = (b_1, ..., b_m) with n + m - 1 <= p(G), the
sums a_1 + b_1, ..., a_1 + b_m can be extended by one sum a_j + b_{i_j} for
every j >= 2 so that all n + m - 1 sums are distinct.  Each a_j must pick an
element of X_j = (a_j + B) \\ (a_1 + B); Hall's condition for the X_j follows
from the Cauchy–Davenport bound in G, and Kuhn's augmenting paths find the
system of distinct representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import PreconditionError, SearchFailure
from .groups import FiniteGroup


@dataclass(frozen=True)
class MatchingResult:
    group: FiniteGroup
    a: tuple[int, ...]
    b: tuple[int, ...]
    base_sums: tuple[int, ...]
    # assignment[j - 1] = i_{j+1}: the 1-based position in b chosen for a[j], j >= 1
    assignment: tuple[int, ...]
    representative_sums: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "a": list(self.a),
            "b": list(self.b),
            "base_sums": list(self.base_sums),
            "assignment": list(self.assignment),
            "representative_sums": list(self.representative_sums),
        }


def candidate_sets(g: FiniteGroup, a: Sequence[int], b: Sequence[int]) -> list[set[int]]:
    """X_j = (a_j + B) \\ (a_1 + B) for j = 2..n."""
    base = {g.add(a[0], y) for y in b}
    return [{g.add(x, y) for y in b} - base for x in a[1:]]


def _kuhn(adj: list[list[int]]) -> dict[int, int] | None:
    """Left vertex -> right vertex, saturating the left side, or None."""
    owner: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = u
                return True
        return False

    for u in range(len(adj)):
        if not augment(u, set()):
            return None
    return {u: v for v, u in owner.items()}


def hall_representatives(a: Sequence[int], b: Sequence[int], g: FiniteGroup) -> MatchingResult:
    a, b = tuple(a), tuple(b)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise PreconditionError("A and B must be non-empty")
    if len(set(a)) != n or len(set(b)) != m:
        raise PreconditionError("A and B must list distinct elements")
    if g.order > 1 and n + m - 1 > g.least_prime_factor:
        raise PreconditionError(f"n + m - 1 = {n + m - 1} exceeds p(G) = {g.least_prime_factor}")
    base = tuple(g.add(a[0], y) for y in b)
    xs = candidate_sets(g, a, b)
    match = _kuhn([sorted(x) for x in xs])
    if match is None:
        raise SearchFailure(f"no system of distinct representatives for A={a}, B={b}")
    assignment, reps = [], []
    for j in range(1, n):
        c = match[j - 1]
        y = g.add(g.neg(a[j]), c)  # a_j + y = c
        assignment.append(b.index(y) + 1)
        reps.append(c)
    return MatchingResult(g, a, b, base, tuple(assignment), tuple(reps))


def hall_representatives_any(a: Sequence[int], b: Sequence[int], g: FiniteGroup) -> list[MatchingResult]:
    """One result per choice of the distinguished first element of A."""
    a = list(a)
    return [hall_representatives([a[i]] + a[:i] + a[i + 1 :], b, g) for i in range(len(a))]


def verify_sdr(result: MatchingResult) -> bool:
    g, a, b = result.group, result.a, result.b
    m = len(b)
    if len(result.assignment) != len(a) - 1:
        return False
    if any(not 1 <= i <= m for i in result.assignment):
        return False
    sums = [g.add(a[0], y) for y in b]
    sums += [g.add(a[j], b[i - 1]) for j, i in enumerate(result.assignment, start=1)]
    if tuple(sums[:m]) != result.base_sums or tuple(sums[m:]) != result.representative_sums:
        return False
    return len(set(sums)) == len(sums)


def hall_condition_holds(a: Sequence[int], b: Sequence[int], g: FiniteGroup) -> bool:
    """|⋃_{j∈J} X_j| >= |J| for every non-empty J ⊆ {2..n}."""
    xs = candidate_sets(g, a, b)
    for r in range(1, len(xs) + 1):
        for sub in combinations(xs, r):
            if len(set().union(*sub)) < r:
                return False
    return True
