"""Sumsets A+B, restricted sumsets A∔B and twisted sumsets A+^σB.

Two layers live here: scalar functions on :class:`GroupSubset` and a batched
:class:`SumsetKernel` that evaluates many (A, B) pairs at once for the
verification scans.  Exclusions are applied per summand (a pair (a, b) is
dropped when a equals the excluded partner of b), so a sum with both excluded
and allowed witnesses is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import GroupMismatchError, PreconditionError
from .groups import FiniteGroup, GroupSubset
from .morphisms import Automorphism, apply

BoundKind = Literal["cauchy_davenport", "anr_restricted", "eh_diagonal", "balister_wheeler"]
BOUND_KINDS: tuple[str, ...] = ("cauchy_davenport", "anr_restricted", "eh_diagonal", "balister_wheeler")

MASK_KERNEL_MAX_ORDER = 16


def _same_group(*items) -> FiniteGroup:
    g = items[0].group
    for it in items[1:]:
        if it.group is not g and it.group != g:
            raise GroupMismatchError("operands belong to different groups")
    return g


def _pair_sums(g: FiniteGroup, a: GroupSubset, b: GroupSubset, partner: Sequence[int] | None) -> GroupSubset:
    rows = g._rows
    blist = b.to_list()
    out = 0
    for x in a:
        r = rows[x]
        if partner is None:
            for y in blist:
                out |= 1 << r[y]
        else:
            for y in blist:
                if partner[y] != x:
                    out |= 1 << r[y]
    return GroupSubset(g, out)


def sumset(a: GroupSubset, b: GroupSubset) -> GroupSubset:
    """A + B = {a + b}."""
    g = _same_group(a, b)
    return _pair_sums(g, a, b, None)


def restricted_sumset(a: GroupSubset, b: GroupSubset) -> GroupSubset:
    """A ∔ B = {a + b : a ≠ b}."""
    g = _same_group(a, b)
    return _pair_sums(g, a, b, range(g.order))


def sigma_restricted_sumset(a: GroupSubset, b: GroupSubset, sigma: Automorphism) -> GroupSubset:
    """A +^σ B = {a + b : a ≠ σ(b)}."""
    g = _same_group(a, b, sigma)
    return _pair_sums(g, a, b, sigma.perm)


def theorem_form_sumset(a: GroupSubset, sigma: Automorphism) -> GroupSubset:
    """σ(A) +^σ A."""
    _same_group(a, sigma)
    return sigma_restricted_sumset(apply(sigma, a), a, sigma)


def negate(a: GroupSubset) -> GroupSubset:
    g = a.group
    return g.subset(g.neg(x) for x in a)


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class BoundSpec:
    kind: str
    value: int


def _size(x) -> int:
    return x if isinstance(x, int) else len(x)


def bound_value(kind: str, p: int, size_a: int, size_b: int | None = None, sigma_order: int | None = None) -> int:
    if kind == "cauchy_davenport":
        return min(p, size_a + size_b - 1)
    if kind == "anr_restricted":
        return min(p, size_a + size_b - 2)
    if kind == "eh_diagonal":
        return min(p, 2 * size_a - 3)
    if kind == "balister_wheeler":
        delta = 1 if sigma_order % 2 == 0 else 0
        return min(p - delta, size_a + size_b - 3)
    raise ValueError(f"unknown bound kind {kind!r}")


def evaluate_bound(
    kind: str,
    g: FiniteGroup,
    a: GroupSubset | int,
    b: GroupSubset | int | None = None,
    sigma: Automorphism | None = None,
) -> BoundSpec:
    """The formula value of a bound; never evaluates a sumset.

    Empty inputs are allowed and can give negative values, which are reported
    unchanged.
    """
    if kind not in BOUND_KINDS:
        raise ValueError(f"unknown bound kind {kind!r}")
    if kind in ("cauchy_davenport", "anr_restricted", "balister_wheeler") and b is None:
        raise PreconditionError(f"{kind} bound needs both A and B")
    if kind == "balister_wheeler" and sigma is None:
        raise PreconditionError("balister_wheeler bound needs an automorphism")
    p = g.least_prime_factor
    return BoundSpec(
        kind,
        bound_value(
            kind,
            p,
            _size(a),
            None if b is None else _size(b),
            None if sigma is None else sigma.order,
        ),
    )


# ---------------------------------------------------------------------------
# batched kernels


def _popcount_table(n: int) -> np.ndarray:
    t = np.zeros(1 << n, dtype=np.int8)
    for i in range(n):
        t[1 << i : 1 << (i + 1)] = t[: 1 << i] + 1
    return t


class SumsetKernel:
    """Vectorised sumset sizes for many (A, B) pairs over one group.

    Subsets come in as boolean membership rows of shape (k, n).  ``partner``
    selects the exclusion rule: ``None`` for plain sums, ``"diagonal"`` for
    a ≠ b, or an integer array giving the forbidden partner σ(b) of every b,
    either shared (n,) or per row (k, n).
    """

    def __init__(self, g: FiniteGroup, *, chunk_elems: int = 4_000_000) -> None:
        self.group = g
        self.n = n = g.order
        self.chunk_elems = chunk_elems
        self.weights = (1 << np.arange(n, dtype=np.int64)) if n <= 62 else None
        self.use_masks = n <= MASK_KERNEL_MAX_ORDER
        if self.use_masks:
            size = 1 << n
            trans = np.zeros((n, size), dtype=np.int64)
            for a in range(n):
                row = trans[a]
                for i in range(n):
                    lo = 1 << i
                    row[lo : 2 * lo] = row[:lo] | (1 << int(g.table[a, i]))
            self.translate = trans
            self.popcount = _popcount_table(n)
            self.member_table = ((np.arange(size)[:, None] >> np.arange(n)) & 1).astype(bool)

    # helpers

    def masks(self, member: np.ndarray) -> np.ndarray:
        if self.weights is None:
            raise ValueError("bit masks need order <= 62")
        return member.astype(np.int64) @ self.weights

    def _partner_rows(self, partner, k: int) -> np.ndarray | None:
        if partner is None:
            return None
        if isinstance(partner, str):
            if partner != "diagonal":
                raise ValueError(f"unknown partner rule {partner!r}")
            return np.broadcast_to(np.arange(self.n), (k, self.n))
        arr = np.asarray(partner, dtype=np.int64)
        if arr.ndim == 1:
            arr = np.broadcast_to(arr, (k, self.n))
        return arr

    # mask path: result mask = OR_a [a ∈ A] · translate[a][B minus the b excluded for a]

    def mask_sets(self, a_mask: np.ndarray, b_mask: np.ndarray, partner=None) -> np.ndarray:
        k = a_mask.shape[0]
        diagonal = isinstance(partner, str) and partner == "diagonal"
        prow = None if diagonal else self._partner_rows(partner, k)
        if prow is not None:
            # forbidden b for summand a is the b with partner(b) == a
            inv = np.empty_like(prow)
            np.put_along_axis(inv, prow, np.broadcast_to(np.arange(self.n), prow.shape), axis=1)
        out = np.zeros(k, dtype=np.int64)
        for a in range(self.n):
            has = (a_mask >> a) & 1
            if not has.any():
                continue
            if diagonal:
                bm = b_mask & ~np.int64(1 << a)
            elif prow is None:
                bm = b_mask
            else:
                bm = b_mask & ~(np.int64(1) << inv[:, a])
            out |= np.where(has.astype(bool), self.translate[a][bm], 0)
        return out

    def mask_sizes(self, a_mask: np.ndarray, b_mask: np.ndarray, partner=None) -> np.ndarray:
        return self.popcount[self.mask_sets(a_mask, b_mask, partner)].astype(np.int64)

    # index path

    def _index_form(self, member: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        counts = member.sum(axis=1)
        width = max(1, int(counts.max()) if counts.size else 1)
        idx = np.argsort(~member, axis=1, kind="stable")[:, :width]
        valid = np.arange(width)[None, :] < counts[:, None]
        return idx, valid

    def _index_sets(self, a: np.ndarray, b: np.ndarray, prow) -> np.ndarray:
        k = a.shape[0]
        ai, av = self._index_form(a)
        bi, bv = self._index_form(b)
        sums = self.group.table[ai[:, :, None], bi[:, None, :]]
        ok = av[:, :, None] & bv[:, None, :]
        if prow is not None:
            forbid = np.take_along_axis(prow, bi, axis=1)
            ok &= ai[:, :, None] != forbid[:, None, :]
        out = np.zeros((k, self.n), dtype=bool)
        rows = np.broadcast_to(np.arange(k)[:, None, None], sums.shape)
        out[rows[ok], sums[ok]] = True
        return out

    # public batched API

    def sets(self, a: np.ndarray, b: np.ndarray, partner=None) -> np.ndarray:
        """Membership rows (k, n) of the (restricted) sumsets."""
        a = np.asarray(a, dtype=bool)
        b = np.asarray(b, dtype=bool)
        k = a.shape[0]
        prow = self._partner_rows(partner, k)
        if self.use_masks:
            m = self.mask_sets(self.masks(a), self.masks(b), prow)
            return self.member_table[m]
        out = np.zeros((k, self.n), dtype=bool)
        per_row = max(1, int(a.sum(1).max(initial=1)) * int(b.sum(1).max(initial=1)))
        step = max(1, self.chunk_elems // per_row)
        for s in range(0, k, step):
            sl = slice(s, s + step)
            out[sl] = self._index_sets(a[sl], b[sl], None if prow is None else prow[sl])
        return out

    def sizes(self, a: np.ndarray, b: np.ndarray, partner=None) -> np.ndarray:
        a = np.asarray(a, dtype=bool)
        b = np.asarray(b, dtype=bool)
        if self.use_masks:
            return self.mask_sizes(self.masks(a), self.masks(b), partner)
        return self.sets(a, b, partner).sum(axis=1)
