"""Structure of extremal sets: commutativity, σ-commutativity, progressions, cosets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .errors import GroupMismatchError
from .groups import GroupSubset, TrivialGroupError
from .morphisms import Automorphism, QuotientStructure
from .sumsets import restricted_sumset, theorem_form_sumset

CONSISTENT = "CONSISTENT"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
HYPOTHESES_NOT_MET = "HYPOTHESES_NOT_MET"


@dataclass(frozen=True)
class CosetDecomposition:
    """A = ⋃ (a_j + S_j) with S_j ⊆ H and the a_j in distinct cosets."""

    quotient_ref: QuotientStructure
    parts: tuple[tuple[int, GroupSubset], ...]

    def reassemble(self) -> GroupSubset:
        g = self.quotient_ref.parent
        return g.subset(g.add(a, s) for a, part in self.parts for s in part)

    @property
    def representatives(self) -> list[int]:
        return [a for a, _ in self.parts]


def coset_decompose(a: GroupSubset, q: QuotientStructure) -> CosetDecomposition:
    g = q.parent
    if a.group != g:
        raise GroupMismatchError("subset is not in the quotient's parent group")
    buckets: dict[int, list[int]] = {}
    for x in a:
        buckets.setdefault(q.projection[x], []).append(x)
    parts = []
    for c, xs in buckets.items():
        rep = q.section[c]
        nrep = g.neg(rep)
        parts.append((rep, g.subset(g.add(nrep, x) for x in xs)))
    parts.sort(key=lambda part: (-len(part[1]), part[0]))
    return CosetDecomposition(q, tuple(parts))


def is_commutative_subset(a: GroupSubset) -> bool:
    g = a.group
    xs = a.to_list()
    return all(g.add(x, y) == g.add(y, x) for i, x in enumerate(xs) for y in xs[i + 1 :])


def is_sigma_commutative(a: GroupSubset, sigma: Automorphism) -> bool:
    """σ(a1) + a2 = σ(a2) + a1 for all a1, a2 in A."""
    g = a.group
    if sigma.group != g:
        raise GroupMismatchError("subset and automorphism belong to different groups")
    xs = a.to_list()
    return all(
        g.add(sigma(x), y) == g.add(sigma(y), x) for i, x in enumerate(xs) for y in xs[i + 1 :]
    )


def sigma_commutativity_witness(a: GroupSubset, sigma: Automorphism) -> tuple[int, int] | None:
    g = a.group
    xs = a.to_list()
    for i, x in enumerate(xs):
        for y in xs[i + 1 :]:
            if g.add(sigma(x), y) != g.add(sigma(y), x):
                return x, y
    return None


def progression(g, start: int, step: int, length: int) -> list[int]:
    out = [start]
    for _ in range(length - 1):
        out.append(g.add(out[-1], step))
    return out


def find_ap_decomposition(a: GroupSubset) -> tuple[int, int] | None:
    """Least (a, d) with a + d = d + a and A = {a, a+d, ..., a+(n-1)d}."""
    g = a.group
    xs = a.to_list()
    n = len(xs)
    if n == 0:
        raise ValueError("progression search needs a non-empty set")
    if n == 1:
        return xs[0], 0
    target = a.bits
    for start in xs:
        for d in range(1, g.order):
            if g.add(start, d) != g.add(d, start):
                continue
            bits, cur = 1 << start, start
            for _ in range(n - 1):
                cur = g.add(cur, d)
                if not (target >> cur) & 1 or (bits >> cur) & 1:
                    break
                bits |= 1 << cur
            else:
                if bits == target:
                    return start, d
    return None


@dataclass
class EqualityCaseReport:
    """Outcome of checking the small-doubling structure conclusions on one set.

    ``verdict`` is CONSISTENT, COUNTEREXAMPLE or HYPOTHESES_NOT_MET; only
    sizes n >= 5 can fail on the progression conclusion, smaller sizes record
    the progression status for information only.
    """

    elements: list[int]
    size: int
    p: int | None
    size_hypothesis: bool
    restricted_size: int
    equality: bool
    commutative: bool
    progression: tuple[int, int] | None
    verdict: str
    violated: str | None = None
    sigma: list[int] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["progression"] = list(self.progression) if self.progression else None
        return d


def classify_equality_case(a: GroupSubset) -> EqualityCaseReport:
    g = a.group
    n = len(a)
    try:
        p = g.least_prime_factor
    except TrivialGroupError:
        p = None
    rs = len(restricted_sumset(a, a))
    size_ok = p is not None and n >= 1 and 2 * n < p + 3
    equality = rs == 2 * n - 3
    commutative = is_commutative_subset(a)
    ap = find_ap_decomposition(a) if n >= 1 else None
    notes: list[str] = []
    if not (size_ok and equality):
        verdict, violated = HYPOTHESES_NOT_MET, None
    elif not commutative:
        verdict, violated = COUNTEREXAMPLE, "commutative"
    elif n >= 5 and ap is None:
        verdict, violated = COUNTEREXAMPLE, "arithmetic_progression"
    else:
        verdict, violated = CONSISTENT, None
        if n in (3, 4) and ap is None:
            notes.append("no progression structure at size 3-4 (not a failure)")
    return EqualityCaseReport(a.to_list(), n, p, size_ok, rs, equality, commutative, ap, verdict, violated, notes=notes)


def classify_sigma_equality_case(a: GroupSubset, sigma: Automorphism) -> EqualityCaseReport:
    """The σ-twisted analogue: odd σ, 2|A| - 3 < p(G) and |σ(A) +^σ A| = 2|A| - 3."""
    g = a.group
    n = len(a)
    try:
        p = g.least_prime_factor
    except TrivialGroupError:
        p = None
    rs = len(theorem_form_sumset(a, sigma))
    size_ok = p is not None and n >= 1 and 2 * n - 3 < p and sigma.order % 2 == 1
    equality = rs == 2 * n - 3
    sc = is_sigma_commutative(a, sigma)
    if not (size_ok and equality):
        verdict, violated = HYPOTHESES_NOT_MET, None
    elif not sc:
        verdict, violated = COUNTEREXAMPLE, "sigma_commutative"
    else:
        verdict, violated = CONSISTENT, None
    return EqualityCaseReport(
        a.to_list(), n, p, size_ok, rs, equality, is_commutative_subset(a), None, verdict, violated,
        sigma=list(sigma.perm),
    )
