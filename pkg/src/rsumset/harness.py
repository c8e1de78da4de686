"""Exhaustive and sampled verification of the sumset bounds and structure results.

Every check walks an instance stream produced from a :class:`SearchPlan` in
fixed-size batches, evaluates sumset sizes with :class:`SumsetKernel`, and
collects violations with enough payload to replay them.  Batches are
independent, so they may be evaluated concurrently; results are merged in
stream order, which keeps reports deterministic.
"""

from __future__ import annotations

import itertools
import logging
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import OrderCapError, PreconditionError
from .groups import FiniteGroup, GroupSubset
from .matching import hall_representatives, verify_sdr
from .morphisms import Automorphism, enumerate_automorphisms, odd_order_automorphisms
from .plan import Pruning, SearchPlan, VerificationReport, Violation
from .structure import (
    COUNTEREXAMPLE,
    classify_equality_case,
    find_ap_decomposition,
    is_commutative_subset,
    sigma_commutativity_witness,
)
from .sumsets import (
    SumsetKernel,
    bound_value,
    restricted_sumset,
    sigma_restricted_sumset,
    sumset,
    theorem_form_sumset,
)

log = logging.getLogger(__name__)

KINDS = ("pair", "single", "sigma_single", "sigma_pair")
SAMPLE_BATCH = 4096
MAX_PAIR_ROWS = 1 << 20
ORBIT_TABLE_LIMIT = 60_000_000
JOBS_ENV = "RSUMSET_JOBS"


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# subset domains


class SubsetDomain:
    """All non-empty subsets of size <= max_size, in increasing bit-vector order."""

    def __init__(self, g: FiniteGroup, max_size: int | None) -> None:
        n = g.order
        self.group = g
        self.max_size = n if max_size is None else min(max_size, n)
        if self.max_size == n and n <= 20:
            masks = np.arange(1, 1 << n, dtype=np.int64)
            self.member = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
            self.keys: list[int] = masks.tolist()
        else:
            rows = []
            for size in range(1, self.max_size + 1):
                for combo in itertools.combinations(range(n), size):
                    rows.append(combo)
            keys = [sum(1 << x for x in combo) for combo in rows]
            order = sorted(range(len(rows)), key=keys.__getitem__)
            self.keys = [keys[i] for i in order]
            member = np.zeros((len(rows), n), dtype=bool)
            for r, i in enumerate(order):
                member[r, list(rows[i])] = True
            self.member = member
        self.sizes = self.member.sum(axis=1)
        self.mask64 = np.asarray(self.keys, dtype=np.int64) if n <= 62 else None
        self._lookup: dict[int, int] | None = None

    def __len__(self) -> int:
        return len(self.keys)

    def index_of_members(self, member: np.ndarray) -> np.ndarray:
        """Domain index of each membership row (rows must lie in the domain)."""
        if self.mask64 is not None:
            m = member.astype(np.int64) @ (1 << np.arange(self.group.order, dtype=np.int64))
            idx = np.searchsorted(self.mask64, m)
            return idx
        if self._lookup is None:
            self._lookup = {k: i for i, k in enumerate(self.keys)}
        return np.array(
            [self._lookup[sum(1 << int(x) for x in np.flatnonzero(row))] for row in member], dtype=np.int64
        )

    def subset(self, i: int) -> GroupSubset:
        return GroupSubset(self.group, self.keys[i])

    def negation_index(self) -> np.ndarray:
        return self.index_of_members(self.member[:, self.group.inv])

    def image_table(self, auts: Sequence[Automorphism]) -> np.ndarray:
        """img[k, s] = domain index of φ_k(S_s)."""
        out = np.empty((len(auts), len(self)), dtype=np.int64)
        for k, phi in enumerate(auts):
            # φ(S) contains y iff S contains φ^{-1}(y)
            out[k] = self.index_of_members(self.member[:, list(phi.inverse_perm)])
        return out


def predicted_count(dom_a: SubsetDomain, dom_b: SubsetDomain | None, n_sigma: int | None) -> int:
    total = len(dom_a)
    if dom_b is not None:
        total *= len(dom_b)
    if n_sigma is not None:
        total *= n_sigma
    return total


# ---------------------------------------------------------------------------
# batches and streams


@dataclass
class Batch:
    a: np.ndarray  # (k,) domain indices or (k, n) membership for sampled batches
    b: np.ndarray | None
    sigma: np.ndarray | None
    weight: np.ndarray
    member_a: np.ndarray
    member_b: np.ndarray | None


class _Context:
    """Domains, automorphisms and orbit tables shared by one run."""

    def __init__(
        self,
        g: FiniteGroup,
        plan: SearchPlan,
        kind: str,
        sigmas: Sequence[Automorphism] | None,
        max_sizes: tuple[int | None, int | None],
        aut_group: Sequence[Automorphism] | None = None,
    ) -> None:
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.group, self.plan, self.kind = g, plan, kind
        self.sigmas = list(sigmas) if sigmas is not None else None
        self.notes: list[str] = []
        n = g.order
        cap_a, cap_b = max_sizes
        self.cap_a = n if cap_a is None else min(cap_a, n)
        self.cap_b = n if cap_b is None else min(cap_b, n)
        self.has_b = kind in ("pair", "sigma_pair")
        self.dom_a = self.dom_b = None
        if plan.mode != "sampled":
            self.dom_a = SubsetDomain(g, self.cap_a)
            if self.has_b:
                self.dom_b = self.dom_a if self.cap_b == self.cap_a else SubsetDomain(g, self.cap_b)
        self.pruning = plan.pruning
        self._aut_group = aut_group
        if plan.mode == "sampled" and (self.pruning.use_inversion_symmetry or self.pruning.use_automorphism_orbits):
            self.notes.append("pruning ignored in sampled mode")
            self.pruning = Pruning()
        if kind.startswith("sigma") and self.pruning != Pruning():
            self.notes.append("pruning not applied to twisted sums")
            self.pruning = Pruning()
        if self.pruning.use_inversion_symmetry and self.has_b and self.dom_b is not self.dom_a:
            self.notes.append("inversion pruning needs equal size caps; disabled")
            self.pruning = Pruning(False, self.pruning.use_automorphism_orbits)

    # -- exhaustive

    def _orbit_tables(self):
        auts = self._aut_group
        if auts is None:
            auts = enumerate_automorphisms(self.group)
        if self.dom_a.mask64 is None or len(auts) * len(self.dom_a) > ORBIT_TABLE_LIMIT:
            raise OrderCapError("automorphism orbit table too large")
        img = self.dom_a.image_table(auts)
        return img

    def exhaustive_batches(self) -> Iterator[Batch]:
        dom_a, dom_b = self.dom_a, self.dom_b
        pr = self.pruning
        img = None
        if pr.use_automorphism_orbits:
            try:
                img = self._orbit_tables()
            except OrderCapError as exc:
                self.notes.append(f"automorphism pruning skipped: {exc}")
                pr = Pruning(pr.use_inversion_symmetry, False)
        neg = dom_a.negation_index() if pr.use_inversion_symmetry else None
        sig_list = self.sigmas if self.kind.startswith("sigma") else [None]
        for s_idx, _ in enumerate(sig_list):
            if self.has_b:
                yield from self._pair_batches(img, neg, s_idx if self.kind == "sigma_pair" else None)
            else:
                yield from self._single_batches(img, neg, s_idx if self.kind == "sigma_single" else None)

    def _single_batches(self, img, neg, s_idx) -> Iterator[Batch]:
        dom = self.dom_a
        idx = np.arange(len(dom))
        weight = np.ones(len(dom), dtype=np.int64)
        if img is not None:
            rep = img.min(axis=0)
            keep = rep == idx
            stab = (img == idx[None, :]).sum(axis=0)
            weight = img.shape[0] // stab
            if neg is not None:
                partner = rep[neg]
                keep &= idx <= partner
                weight = weight * np.where(partner == idx, 1, 2)
            idx, weight = idx[keep], weight[keep]
        elif neg is not None:
            keep = idx <= neg
            weight = np.where(neg == idx, 1, 2)[keep]
            idx = idx[keep]
        for s in range(0, len(idx), MAX_PAIR_ROWS):
            sl = slice(s, s + MAX_PAIR_ROWS)
            ai = idx[sl]
            sig = None if s_idx is None else np.full(len(ai), s_idx)
            yield Batch(ai, None, sig, weight[sl], dom.member[ai], None)

    def _pair_batches(self, img, neg, s_idx) -> Iterator[Batch]:
        dom_a, dom_b = self.dom_a, self.dom_b
        nb = len(dom_b)
        b_all = np.arange(nb)
        if img is not None:
            rep = img.min(axis=0)
            a_iter: Iterable[int] = np.flatnonzero(rep == np.arange(len(dom_a))).tolist()
            if neg is not None:
                big = np.iinfo(np.int64).max
                t_mask = img == rep[None, :]  # φ taking each subset to its representative
        else:
            a_iter = range(len(dom_a))
        block = max(1, MAX_PAIR_ROWS // nb)
        pending_a, pending_b, pending_w = [], [], []
        pending = 0

        def flush():
            ai = np.concatenate(pending_a)
            bi = np.concatenate(pending_b)
            w = np.concatenate(pending_w)
            sig = None if s_idx is None else np.full(len(ai), s_idx)
            return Batch(ai, bi, sig, w, dom_a.member[ai], dom_b.member[bi])

        for a in a_iter:
            if img is not None:
                stab = img[:, a] == a
                bimg = img[stab]
                keep = bimg.min(axis=0) == b_all
                bi = b_all[keep]
                pair_stab = (bimg[:, keep] == bi[None, :]).sum(axis=0)
                w = img.shape[0] // pair_stab
                if neg is not None:
                    x = neg[bi]
                    y = neg[a]
                    rep_x = rep[x]
                    partner_y = np.where(t_mask[:, x], img[:, y][:, None], big).min(axis=0)
                    own_le = (a < rep_x) | ((a == rep_x) & (bi <= partner_y))
                    same = (a == rep_x) & (bi == partner_y)
                    bi, w = bi[own_le], (w * np.where(same, 1, 2))[own_le]
            else:
                bi = b_all
                w = np.ones(nb, dtype=np.int64)
                if neg is not None:
                    x, y = neg[bi], neg[a]
                    own_le = (a < x) | ((a == x) & (bi <= y))
                    same = (a == x) & (bi == y)
                    bi, w = bi[own_le], np.where(same, 1, 2)[own_le]
            if not len(bi):
                continue
            pending_a.append(np.full(len(bi), a, dtype=np.int64))
            pending_b.append(bi)
            pending_w.append(w)
            pending += len(bi)
            if pending >= block * nb:
                yield flush()
                pending_a, pending_b, pending_w, pending = [], [], [], 0
        if pending:
            yield flush()

    # -- sampled

    def sampled_batches(self) -> Iterator[Batch]:
        g, plan = self.group, self.plan
        n = g.order
        rng = np.random.default_rng(plan.seed)
        remaining = plan.sample_count
        n_sig = len(self.sigmas) if self.sigmas is not None else 0
        while remaining > 0:
            k = min(SAMPLE_BATCH, remaining)
            remaining -= k
            ma = _random_subsets(rng, k, n, self.cap_a)
            mb = _random_subsets(rng, k, n, self.cap_b) if self.has_b else None
            sig = rng.integers(0, n_sig, size=k) if self.kind.startswith("sigma") else None
            yield Batch(ma, mb, sig, np.ones(k, dtype=np.int64), ma, mb)

    def batches(self) -> Iterator[Batch]:
        if self.plan.mode == "sampled":
            return self.sampled_batches()
        return self.exhaustive_batches()


def _random_subsets(rng: np.random.Generator, k: int, n: int, cap: int) -> np.ndarray:
    """k subsets; size uniform on 1..cap, then uniform among subsets of that size."""
    sizes = rng.integers(1, cap + 1, size=k)
    ranks = np.argsort(np.argsort(rng.random((k, n)), axis=1), axis=1)
    return ranks < sizes[:, None]


def instance_stream(
    g: FiniteGroup,
    plan: SearchPlan,
    kind: str = "pair",
    sigmas: Sequence[Automorphism] | None = None,
) -> Iterator[tuple]:
    """Deterministic stream of (A, B, σ, weight) tuples.

    B or σ are ``None`` where the kind has no such component; ``weight`` is
    the number of instances the emitted one stands for under pruning.
    """
    if kind.startswith("sigma") and sigmas is None:
        sigmas = enumerate_automorphisms(g)
    ctx = _Context(g, plan, kind, sigmas, plan.size_caps)
    for batch in ctx.batches():
        for r in range(len(batch.weight)):
            a = _row_subset(g, batch.member_a[r])
            b = None if batch.member_b is None else _row_subset(g, batch.member_b[r])
            s = None if batch.sigma is None else ctx.sigmas[int(batch.sigma[r])]
            yield a, b, s, int(batch.weight[r])


def _row_subset(g: FiniteGroup, row: np.ndarray) -> GroupSubset:
    return GroupSubset(g, sum(1 << int(x) for x in np.flatnonzero(row)))


# ---------------------------------------------------------------------------
# running


def _ordered_map(fn: Callable, items: Iterator, jobs: int) -> Iterator:
    if jobs <= 1:
        for it in items:
            yield fn(it)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        window: deque = deque()
        for it in items:
            window.append(pool.submit(fn, it))
            if len(window) >= 2 * jobs:
                yield window.popleft().result()
        while window:
            yield window.popleft().result()


def _run(
    theorem: str,
    g: FiniteGroup,
    plan: SearchPlan,
    kind: str,
    evaluate: Callable[[Batch], VerificationReport],
    *,
    sigmas=None,
    max_sizes=None,
    jobs: int | None = None,
    aut_group=None,
) -> VerificationReport:
    start = time.perf_counter()
    ctx = _Context(g, plan, kind, sigmas, max_sizes or plan.size_caps, aut_group=aut_group)
    report = VerificationReport(plan=plan, theorem=theorem)
    covered = 0
    for part in _ordered_map(evaluate, ctx.batches(), jobs or default_jobs()):
        covered += part.counters.pop("_covered", 0)
        report = report.merge(part)
    report.counters["covered_instances"] = covered
    if plan.mode == "sampled":
        report.counters["predicted_instances"] = plan.sample_count
    else:
        n_sig = len(ctx.sigmas) if kind.startswith("sigma") else None
        report.counters["predicted_instances"] = predicted_count(ctx.dom_a, ctx.dom_b, n_sig)
    report.notes = ctx.notes + report.notes
    report.wall_time = time.perf_counter() - start
    return report


def _partial(theorem: str, plan: SearchPlan, rows: int, covered: int, violations, counters=None) -> VerificationReport:
    c = dict(counters or {})
    c["_covered"] = covered
    return VerificationReport(plan=plan, theorem=theorem, instances_checked=rows, violations=violations, counters=c)


def _members_to_list(row: np.ndarray) -> list[int]:
    return np.flatnonzero(row).tolist()


def _sizes(kernel: SumsetKernel, ma: np.ndarray, mb: np.ndarray, partner) -> np.ndarray:
    return kernel.sizes(ma, mb, partner)


# ---------------------------------------------------------------------------
# individual checks


def verify_cauchy_davenport(g: FiniteGroup, plan: SearchPlan, *, jobs: int | None = None) -> VerificationReport:
    """|A + B| >= min{p(G), |A| + |B| - 1} for non-empty A, B."""
    kernel = SumsetKernel(g)
    p = g.least_prime_factor if g.order > 1 else 1

    def evaluate(batch: Batch) -> VerificationReport:
        lhs = _sizes(kernel, batch.member_a, batch.member_b, None)
        sa, sb = batch.member_a.sum(1), batch.member_b.sum(1)
        rhs = np.minimum(p, sa + sb - 1)
        bad = np.flatnonzero(lhs < rhs)
        viol = [
            Violation(
                a=_members_to_list(batch.member_a[r]), b=_members_to_list(batch.member_b[r]),
                lhs=int(lhs[r]), rhs=int(rhs[r]), kind="cauchy_davenport",
            )
            for r in bad
        ]
        return _partial("cd", plan, len(lhs), int(batch.weight.sum()), viol)

    return _run("cd", g, plan, "pair", evaluate, jobs=jobs)


def verify_theorem1(
    g: FiniteGroup, plan: SearchPlan, *, jobs: int | None = None, automorphisms=None
) -> VerificationReport:
    """|A ∔ B| >= min{p(G), |A| + |B| - 2} for A ≠ B in a nilpotent group.

    Pairs with A = B are checked against min{p(G), 2|A| - 3} and counted
    separately.
    """
    if not g.is_nilpotent:
        raise PreconditionError(f"{g.name} is not nilpotent")
    kernel = SumsetKernel(g)
    p = g.least_prime_factor if g.order > 1 else 1

    def evaluate(batch: Batch) -> VerificationReport:
        ma, mb = batch.member_a, batch.member_b
        lhs = _sizes(kernel, ma, mb, "diagonal")
        sa, sb = ma.sum(1), mb.sum(1)
        same = np.all(ma == mb, axis=1)
        rhs = np.where(same, np.minimum(p, 2 * sa - 3), np.minimum(p, sa + sb - 2))
        bad = np.flatnonzero(lhs < rhs)
        viol = [
            Violation(
                a=_members_to_list(ma[r]), b=_members_to_list(mb[r]), lhs=int(lhs[r]), rhs=int(rhs[r]),
                kind="eh_diagonal" if same[r] else "anr_restricted",
            )
            for r in bad
        ]
        counters = {
            "diagonal_pairs": int(same.sum()),
            "off_diagonal_pairs": int((~same).sum()),
            "binding_regime_pairs": int((sa + sb - 2 <= p).sum()),
        }
        return _partial("thm1", plan, len(lhs), int(batch.weight.sum()), viol, counters)

    return _run("thm1", g, plan, "pair", evaluate, jobs=jobs, aut_group=automorphisms)


def theorem2_size_limit(g: FiniteGroup) -> int:
    """Largest |A| with |A| < (p(G) + 3) / 2."""
    p = g.least_prime_factor
    return (p + 2) // 2


def verify_theorem2(g: FiniteGroup, plan: SearchPlan, *, jobs: int | None = None, automorphisms=None) -> VerificationReport:
    """Every A with |A| < (p(G)+3)/2 and |A ∔ A| = 2|A| - 3 is commutative,
    and a progression {a, a+d, ...} with a + d = d + a once |A| >= 5."""
    kernel = SumsetKernel(g)
    limit = theorem2_size_limit(g)
    cap = plan.size_caps[0]
    max_size = limit if cap is None else min(cap, limit)

    def evaluate(batch: Batch) -> VerificationReport:
        ma = batch.member_a
        lhs = _sizes(kernel, ma, ma, "diagonal")
        sa = ma.sum(1)
        eq = np.flatnonzero(lhs == 2 * sa - 3)
        viol = []
        counters = {"equality_cases": len(eq), "progression_checked": 0, "small_without_progression": 0}
        for r in eq:
            a = _row_subset(g, ma[r])
            n = len(a)
            if not is_commutative_subset(a):
                rep = classify_equality_case(a)
                viol.append(Violation(a=a.to_list(), lhs=int(lhs[r]), rhs=2 * n - 3, kind="commutative",
                                      structure=rep.to_dict()))
                continue
            if n >= 3:
                ap = find_ap_decomposition(a)
                if n >= 5:
                    counters["progression_checked"] += 1
                    if ap is None:
                        rep = classify_equality_case(a)
                        viol.append(Violation(a=a.to_list(), lhs=int(lhs[r]), rhs=2 * n - 3,
                                              kind="arithmetic_progression", structure=rep.to_dict()))
                elif ap is None:
                    counters["small_without_progression"] += 1
        return _partial("thm2", plan, len(lhs), int(batch.weight.sum()), viol, counters)

    report = _run("thm2", g, plan, "single", evaluate, max_sizes=(max_size, None), jobs=jobs,
                  aut_group=automorphisms)
    report.counters["size_limit"] = max_size
    return report


def verify_theorem3(
    g: FiniteGroup,
    plan: SearchPlan,
    *,
    automorphisms: Sequence[Automorphism] | None = None,
    jobs: int | None = None,
) -> VerificationReport:
    """For odd-order σ: 2|A| - 3 < p(G) and |σ(A) +^σ A| = 2|A| - 3 imply A is σ-commutative."""
    partial_note = None
    if automorphisms is None:
        try:
            automorphisms = enumerate_automorphisms(g)
        except OrderCapError as exc:
            partial_note = f"automorphism enumeration skipped: {exc}"
            automorphisms = [Automorphism(g, tuple(range(g.order)), check=False)]
    sigmas = odd_order_automorphisms(automorphisms)
    perms = np.array([s.perm for s in sigmas], dtype=np.int64)
    inv_perms = np.array([s.inverse_perm for s in sigmas], dtype=np.int64)
    kernel = SumsetKernel(g)
    p = g.least_prime_factor if g.order > 1 else 1
    # 2|A| - 3 < p  <=>  |A| <= (p + 2) // 2
    limit = (p + 2) // 2
    cap = plan.size_caps[0]
    max_size = limit if cap is None else min(cap, limit)

    def evaluate(batch: Batch) -> VerificationReport:
        ma = batch.member_a
        sig = batch.sigma
        sma = np.take_along_axis(ma, inv_perms[sig], axis=1)  # σ(A)
        lhs = _sizes(kernel, sma, ma, perms[sig])
        sa = ma.sum(1)
        eq = np.flatnonzero((lhs == 2 * sa - 3) & (2 * sa - 3 < p))
        viol = []
        for r in eq:
            a = _row_subset(g, ma[r])
            s = sigmas[int(sig[r])]
            w = sigma_commutativity_witness(a, s)
            if w is not None:
                viol.append(Violation(a=a.to_list(), sigma=list(s.perm), lhs=int(lhs[r]), rhs=2 * len(a) - 3,
                                      kind="sigma_commutative", extra={"witness": list(w)}))
        return _partial("thm3", plan, len(lhs), int(batch.weight.sum()), viol, {"equality_cases": len(eq)})

    report = _run("thm3", g, plan, "sigma_single", evaluate, sigmas=sigmas, max_sizes=(max_size, None), jobs=jobs)
    report.counters["odd_automorphisms"] = len(sigmas)
    report.counters["size_limit"] = max_size
    if partial_note:
        report.partial = True
        report.notes.append(partial_note)
    return report


def verify_balister_wheeler(
    g: FiniteGroup,
    plan: SearchPlan,
    *,
    automorphisms: Sequence[Automorphism] | None = None,
    jobs: int | None = None,
) -> VerificationReport:
    """|A +^σ B| >= min{p(G) - δ, |A| + |B| - 3}, δ = 1 iff σ has even order."""
    if automorphisms is None:
        automorphisms = enumerate_automorphisms(g)
    sigmas = list(automorphisms)
    perms = np.array([s.perm for s in sigmas], dtype=np.int64)
    delta = np.array([s.order % 2 == 0 for s in sigmas], dtype=np.int64)
    kernel = SumsetKernel(g)
    p = g.least_prime_factor if g.order > 1 else 1

    def evaluate(batch: Batch) -> VerificationReport:
        ma, mb, sig = batch.member_a, batch.member_b, batch.sigma
        lhs = _sizes(kernel, ma, mb, perms[sig])
        sa, sb = ma.sum(1), mb.sum(1)
        rhs = np.minimum(p - delta[sig], sa + sb - 3)
        bad = np.flatnonzero(lhs < rhs)
        viol = [
            Violation(a=_members_to_list(ma[r]), b=_members_to_list(mb[r]), sigma=list(sigmas[int(sig[r])].perm),
                      lhs=int(lhs[r]), rhs=int(rhs[r]), kind="balister_wheeler")
            for r in bad
        ]
        counters = {"even_sigma_instances": int(delta[sig].sum())}
        return _partial("bw", plan, len(lhs), int(batch.weight.sum()), viol, counters)

    report = _run("bw", g, plan, "sigma_pair", evaluate, sigmas=sigmas, jobs=jobs)
    report.counters["automorphisms"] = len(sigmas)
    return report


def verify_hall(g: FiniteGroup, plan: SearchPlan) -> VerificationReport:
    """Distinct representative sums exist for every (A, B) with |A| + |B| - 1 <= p(G).

    Translating A on the left and B on the right moves every sum by the same
    bijection, so it suffices to take a_1 = 0 and 0 ∈ B; each such instance
    stands for every choice of distinguished element and translate.
    """
    start = time.perf_counter()
    p = g.least_prime_factor
    n = g.order
    cap_a, cap_b = plan.size_caps
    others = list(range(1, n))
    checked, failures = 0, []
    if plan.mode == "sampled":
        rng = np.random.default_rng(plan.seed)
        stream = []
        for _ in range(plan.sample_count):
            na = int(rng.integers(1, min(p, cap_a or p) + 1))
            nb = int(rng.integers(1, min(p - na + 1, cap_b or p) + 1))
            a = [0] + sorted(rng.choice(others, na - 1, replace=False).tolist()) if na > 1 else [0]
            b = [0] + sorted(rng.choice(others, nb - 1, replace=False).tolist()) if nb > 1 else [0]
            stream.append((a, b))
    else:
        def gen():
            for na in range(1, min(p, cap_a or p) + 1):
                for nb in range(1, min(p + 1 - na, cap_b or p) + 1):
                    for ra in itertools.combinations(others, na - 1):
                        for rb in itertools.combinations(others, nb - 1):
                            yield [0, *ra], [0, *rb]
        stream = gen()
    for a, b in stream:
        checked += 1
        try:
            res = hall_representatives(a, b, g)
        except Exception as exc:  # noqa: BLE001 - any failure is a violation to report
            failures.append(Violation(a=a, b=b, lhs=0, rhs=len(a) + len(b) - 1, kind="hall", extra={"error": str(exc)}))
            continue
        if not verify_sdr(res):
            failures.append(Violation(a=a, b=b, lhs=0, rhs=len(a) + len(b) - 1, kind="hall",
                                      extra={"result": res.to_dict()}))
    return VerificationReport(
        plan=plan, theorem="hall", instances_checked=checked, violations=failures,
        wall_time=time.perf_counter() - start,
        counters={"success_rate": 1.0 if not failures else 1 - len(failures) / max(1, checked)},
        notes=["instances normalised to a_1 = 0 and 0 in B by translation"],
    )


def verify_lemma_xy(g: FiniteGroup, sigma: Automorphism) -> VerificationReport:
    """Both two-element statements used for the |S_1| = 2 case, checked exhaustively.

    (i)  p(G) > 2, A = {x1, x2}, B = {y}: |(σ(A)+B) ∪ (σ(B)+A)| = 2 forces
         σ(x_i) + y = σ(y) + x_i.
    (ii) p(G) > 3, A = {x1, x2}, B = {y1, y2} with |σ(A) +^σ A| = |σ(B) +^σ B| = 1
         and |(σ(A)+B) ∪ (σ(B)+A)| = 3 forces σ(x_i) + y_j = σ(y_j) + x_i.
    """
    start = time.perf_counter()
    plan = SearchPlan(group=g.name, mode="exhaustive", size_caps=(2, 2))
    p = g.least_prime_factor
    viol: list[Violation] = []
    checked = 0
    if sigma.order % 2 == 0:
        raise PreconditionError("σ must have odd order")
    pairs = list(itertools.combinations(range(g.order), 2))

    def union_size(a, b):
        sa = {g.add(sigma(x), y) for x in a for y in b}
        sb = {g.add(sigma(y), x) for x in a for y in b}
        return len(sa | sb)

    def twisted_ok(a, b):
        return all(g.add(sigma(x), y) == g.add(sigma(y), x) for x in a for y in b)

    if p > 2:
        for a in pairs:
            for y in range(g.order):
                checked += 1
                if union_size(a, (y,)) == 2 and not twisted_ok(a, (y,)):
                    viol.append(Violation(a=list(a), b=[y], sigma=list(sigma.perm), lhs=2, rhs=2, kind="xy-i"))
    if p > 3:
        single = {}
        for a in pairs:
            single[a] = len(theorem_form_sumset(g.subset(a), sigma)) == 1
        for a in pairs:
            if not single[a]:
                continue
            for b in pairs:
                if not single[b]:
                    continue
                checked += 1
                if union_size(a, b) == 3 and not twisted_ok(a, b):
                    viol.append(Violation(a=list(a), b=list(b), sigma=list(sigma.perm), lhs=3, rhs=3, kind="xy-ii"))
    return VerificationReport(plan=plan, theorem="lemma-xy", instances_checked=checked, violations=viol,
                              wall_time=time.perf_counter() - start)


# ---------------------------------------------------------------------------
# extremal scan and replay


def extremal_scan(
    g: FiniteGroup,
    plan: SearchPlan,
    bound_kind: str,
    *,
    automorphisms: Sequence[Automorphism] | None = None,
    limit: int | None = None,
) -> list[dict]:
    """Planned instances whose sumset size equals the bound exactly.

    Hypothesis filters: A ≠ B for anr_restricted, |A| < (p+3)/2 for
    eh_diagonal.  Groups with p(G) = 2 give an empty list.
    """
    if g.order < 2 or g.least_prime_factor == 2:
        return []
    p = g.least_prime_factor
    out: list[dict] = []
    if bound_kind == "eh_diagonal":
        stream = instance_stream(g, plan.with_(size_caps=(min(plan.size_caps[0] or g.order, theorem2_size_limit(g)), None)), "single")
    elif bound_kind == "balister_wheeler":
        stream = instance_stream(g, plan, "sigma_pair", automorphisms or enumerate_automorphisms(g))
    elif bound_kind in ("anr_restricted", "cauchy_davenport"):
        stream = instance_stream(g, plan, "pair")
    else:
        raise ValueError(f"unknown bound kind {bound_kind!r}")
    for a, b, s, _w in stream:
        if bound_kind == "eh_diagonal":
            lhs = len(restricted_sumset(a, a))
            rhs = bound_value("eh_diagonal", p, len(a))
        elif bound_kind == "anr_restricted":
            if a == b:
                continue
            lhs = len(restricted_sumset(a, b))
            rhs = bound_value("anr_restricted", p, len(a), len(b))
        elif bound_kind == "cauchy_davenport":
            lhs = len(sumset(a, b))
            rhs = bound_value("cauchy_davenport", p, len(a), len(b))
        else:
            lhs = len(sigma_restricted_sumset(a, b, s))
            rhs = bound_value("balister_wheeler", p, len(a), len(b), s.order)
        if lhs != rhs:
            continue
        entry = {"bound": bound_kind, "a": a.to_list(), "lhs": lhs, "rhs": rhs,
                 "structure": classify_equality_case(a).to_dict()}
        if b is not None:
            entry["b"] = b.to_list()
            entry["structure_b"] = classify_equality_case(b).to_dict()
        if s is not None:
            entry["sigma"] = list(s.perm)
        out.append(entry)
        if limit is not None and len(out) >= limit:
            break
    return out


def replay_violation(g: FiniteGroup, theorem: str, v: Violation) -> tuple[int, int]:
    """Recompute (lhs, rhs) for a serialized violation from its payload alone."""
    p = g.least_prime_factor
    a = g.subset(v.a)
    b = g.subset(v.b) if v.b is not None else None
    sigma = Automorphism(g, tuple(v.sigma)) if v.sigma is not None else None
    if theorem == "cd":
        return len(sumset(a, b)), bound_value("cauchy_davenport", p, len(a), len(b))
    if theorem == "thm1":
        lhs = len(restricted_sumset(a, b))
        if a == b:
            return lhs, bound_value("eh_diagonal", p, len(a))
        return lhs, bound_value("anr_restricted", p, len(a), len(b))
    if theorem == "thm2":
        return len(restricted_sumset(a, a)), 2 * len(a) - 3
    if theorem == "thm3":
        return len(theorem_form_sumset(a, sigma)), 2 * len(a) - 3
    if theorem == "bw":
        return len(sigma_restricted_sumset(a, b, sigma)), bound_value("balister_wheeler", p, len(a), len(b), sigma.order)
    raise ValueError(f"no replay rule for {theorem!r}")


def default_plans(g: FiniteGroup, seed: int = 0) -> list[SearchPlan]:
    """Exhaustive below order 13; otherwise |A|, |B| <= 4 plus 10^6 samples."""
    if g.order <= 12:
        return [SearchPlan(group=g.name, mode="exhaustive", seed=seed)]
    return [
        SearchPlan(group=g.name, mode="size_capped", size_caps=(4, 4), seed=seed),
        SearchPlan(group=g.name, mode="sampled", sample_count=1_000_000, seed=seed),
    ]
