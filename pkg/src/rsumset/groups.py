"""Finite groups given by explicit Cayley tables.

Groups are written additively even when they are not abelian: ``x + y`` is
``G.add(x, y)`` and ``-x`` is ``G.neg(x)``.  Elements are dense indices
``0..n-1`` and the identity is always index 0.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupDefinitionError, GroupMismatchError, NotASubgroupError, OrderCapError

DEFAULT_ORDER_CAP = 256


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def is_prime(n: int) -> bool:
    return n >= 2 and _smallest_prime_factor(n) == n


class FiniteGroup:
    """An immutable finite group backed by its Cayley table.

    The table is normalised at construction so that the identity is element 0.
    Invariants (Latin square, identity, inverses and, below ``assoc_cap``,
    associativity) are checked before the object is returned; failures raise
    :class:`GroupDefinitionError` carrying a witness.
    """

    def __init__(
        self,
        table: Sequence[Sequence[int]] | np.ndarray,
        labels: Sequence[str] | None = None,
        name: str | None = None,
        *,
        order_cap: int = DEFAULT_ORDER_CAP,
        assoc_cap: int = DEFAULT_ORDER_CAP,
    ) -> None:
        tab = np.asarray(table, dtype=np.int64)
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] == 0:
            raise GroupDefinitionError("table must be a non-empty square array", kind="shape")
        n = tab.shape[0]
        if n > order_cap:
            raise OrderCapError(f"group order {n} exceeds cap {order_cap}")
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = list(labels)
        if len(labels) != n:
            raise GroupDefinitionError("labels length does not match order", kind="shape")
        if tab.min() < 0 or tab.max() >= n:
            raise GroupDefinitionError("table entries out of range", kind="range")
        _check_latin(tab)
        e = _find_identity(tab)
        if e != 0:
            # relabel so that the identity sits at index 0
            perm = list(range(n))
            perm[0], perm[e] = perm[e], perm[0]
            p = np.array(perm)
            tab = p[tab[np.ix_(p, p)]]
            labels[0], labels[e] = labels[e], labels[0]
        inv = np.argmin(tab, axis=1)  # entry 0 is the identity
        if not np.all(tab[np.arange(n), inv] == 0) or not np.all(tab[inv, np.arange(n)] == 0):
            x = int(np.flatnonzero(tab[inv, np.arange(n)] != 0)[0])
            raise GroupDefinitionError(
                f"element {x} has no two-sided inverse", kind="inverse", witness=(x, int(inv[x]), 0)
            )
        if n <= assoc_cap:
            _check_associative(tab)

        tab.setflags(write=False)
        inv.setflags(write=False)
        self.table = tab
        self.inv = inv
        self.order = n
        self.labels = tuple(labels)
        self.name = name or f"G{n}"
        # plain lists for the scalar hot paths
        self._rows = tab.tolist()
        self._inv = inv.tolist()

    # -- basic arithmetic ------------------------------------------------

    identity = 0

    def add(self, x: int, y: int) -> int:
        return self._rows[x][y]

    def neg(self, x: int) -> int:
        return self._inv[x]

    def sub(self, x: int, y: int) -> int:
        """x - y, i.e. x + (-y)."""
        return self._rows[x][self._inv[y]]

    def multiple(self, k: int, x: int) -> int:
        """k·x = x + x + ... + x (k >= 0 copies)."""
        acc = 0
        for _ in range(k):
            acc = self._rows[acc][x]
        return acc

    def commutator(self, x: int, y: int) -> int:
        """-x - y + x + y."""
        r = self._rows
        return r[r[r[self._inv[x]][self._inv[y]]][x]][y]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, x: int) -> int:
        k, acc = 1, x
        while acc != 0:
            acc = self._rows[acc][x]
            k += 1
        return k

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(x) for x in range(self.order))

    # -- identity & hashing ---------------------------------------------

    @cached_property
    def content_hash(self) -> str:
        return hashlib.sha256(self.table.tobytes()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"FiniteGroup(name={self.name!r}, order={self.order})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self is other or (
            self.order == other.order and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash(self.content_hash)

    # -- subsets ---------------------------------------------------------

    def subset(self, elements: Iterable[int] = ()) -> GroupSubset:
        bits = 0
        for x in elements:
            x = int(x)
            if not 0 <= x < self.order:
                raise ValueError(f"element {x} out of range for group of order {self.order}")
            bits |= 1 << x
        return GroupSubset(self, bits)

    def full_set(self) -> GroupSubset:
        return GroupSubset(self, (1 << self.order) - 1)

    # -- cached invariants ----------------------------------------------

    @cached_property
    def least_prime_factor(self) -> int:
        """p(G), the least prime dividing |G|."""
        if self.order < 2:
            raise TrivialGroupError("p(G) is undefined for the trivial group")
        return _smallest_prime_factor(self.order)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def center(self) -> GroupSubset:
        commuting = np.all(self.table == self.table.T, axis=1)
        return self.subset(np.flatnonzero(commuting))

    @cached_property
    def upper_central_series(self) -> tuple[GroupSubset, ...]:
        series = [self.subset([0])]
        while True:
            z = series[-1]
            zbits = z.bits
            nxt = [
                g
                for g in range(self.order)
                if all((zbits >> self.commutator(g, x)) & 1 for x in range(self.order))
            ]
            new = self.subset(nxt)
            if new == z:
                return tuple(series)
            series.append(new)

    @cached_property
    def derived_series(self) -> tuple[GroupSubset, ...]:
        series = [self.full_set()]
        while True:
            cur = list(series[-1])
            comms = {self.commutator(x, y) for x in cur for y in cur}
            nxt = subgroup_generated(self, self.subset(comms))
            if nxt == series[-1]:
                return tuple(series)
            series.append(nxt)

    @cached_property
    def is_nilpotent(self) -> bool:
        return len(self.upper_central_series[-1]) == self.order

    @cached_property
    def is_solvable(self) -> bool:
        return len(self.derived_series[-1]) == 1

    @cached_property
    def nilpotency_class(self) -> int | None:
        return len(self.upper_central_series) - 1 if self.is_nilpotent else None

    @cached_property
    def generating_set(self) -> tuple[int, ...]:
        """A generating set of minimum size (searched up to three elements)."""
        from itertools import combinations

        if self.order == 1:
            return ()
        n = self.order
        by_order = sorted(range(1, n), key=lambda x: (-self.element_orders[x], x))
        for k in (1, 2, 3):
            for combo in combinations(by_order, k):
                if len(subgroup_generated(self, combo)) == n:
                    return tuple(combo)
            if k >= 2 and n > 64:
                break
        # greedy fallback: add whichever element enlarges the span most
        gens: list[int] = []
        span = self.subset([0])
        while len(span) < n:
            best = max(
                (x for x in by_order if x not in span),
                key=lambda x: len(subgroup_generated(self, [*gens, x])),
            )
            gens.append(best)
            span = subgroup_generated(self, gens)
        return tuple(gens)


class TrivialGroupError(ValueError):
    """p(G) requested for the trivial group."""


@dataclass(frozen=True, eq=False)
class GroupSubset:
    """A subset of a specific group, stored as an integer bit-vector."""

    group: FiniteGroup
    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.group.order:
            raise ValueError("bits outside the group's index range")

    def _check(self, other: GroupSubset) -> None:
        if other.group is not self.group and other.group != self.group:
            raise GroupMismatchError("subsets belong to different groups")

    def __iter__(self):
        b, i = self.bits, 0
        while b:
            if b & 1:
                yield i
            b >>= 1
            i += 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool((self.bits >> x) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupSubset):
            return NotImplemented
        return self.bits == other.bits and (other.group is self.group or other.group == self.group)

    def __hash__(self) -> int:
        return hash((self.group.order, self.bits))

    def __or__(self, other: GroupSubset) -> GroupSubset:
        self._check(other)
        return GroupSubset(self.group, self.bits | other.bits)

    def __and__(self, other: GroupSubset) -> GroupSubset:
        self._check(other)
        return GroupSubset(self.group, self.bits & other.bits)

    def __sub__(self, other: GroupSubset) -> GroupSubset:
        self._check(other)
        return GroupSubset(self.group, self.bits & ~other.bits)

    def __le__(self, other: GroupSubset) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def to_list(self) -> list[int]:
        return list(self)

    def to_hex(self) -> str:
        width = (self.group.order + 3) // 4
        return format(self.bits, f"0{width}x")

    def __repr__(self) -> str:
        return f"{{{', '.join(map(str, self))}}}"

    def membership(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.to_list()] = True
        return m


# ---------------------------------------------------------------------------
# validation helpers


def _check_latin(tab: np.ndarray) -> None:
    n = tab.shape[0]
    full = np.arange(n)
    for r in range(n):
        if not np.array_equal(np.sort(tab[r]), full):
            vals, counts = np.unique(tab[r], return_counts=True)
            dup = int(vals[counts > 1][0])
            cols = np.flatnonzero(tab[r] == dup)
            raise GroupDefinitionError(
                f"row {r} repeats {dup} (columns {cols[0]} and {cols[1]})",
                kind="latin",
                witness=(r, int(cols[0]), int(cols[1])),
            )
    for c in range(n):
        if not np.array_equal(np.sort(tab[:, c]), full):
            vals, counts = np.unique(tab[:, c], return_counts=True)
            dup = int(vals[counts > 1][0])
            rows = np.flatnonzero(tab[:, c] == dup)
            raise GroupDefinitionError(
                f"column {c} repeats {dup} (rows {rows[0]} and {rows[1]})",
                kind="latin",
                witness=(int(rows[0]), int(rows[1]), c),
            )


def _find_identity(tab: np.ndarray) -> int:
    n = tab.shape[0]
    full = np.arange(n)
    for e in range(n):
        if np.array_equal(tab[e], full) and np.array_equal(tab[:, e], full):
            return e
    raise GroupDefinitionError("no two-sided identity", kind="identity", witness=(0, 0, 0))


def _check_associative(tab: np.ndarray) -> None:
    # (x+y)+z == x+(y+z); compare slab by slab over x
    n = tab.shape[0]
    for x in range(n):
        left = tab[tab[x]]  # left[y, z] = (x+y)+z
        right = tab[x][tab]  # right[y, z] = x+(y+z)
        bad = np.argwhere(left != right)
        if bad.size:
            y, z = map(int, bad[0])
            raise GroupDefinitionError(
                f"associativity fails at ({x}, {y}, {z})", kind="associativity", witness=(x, y, z)
            )


# ---------------------------------------------------------------------------
# constructors


def build_cyclic(n: int, *, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    if n > order_cap:
        raise OrderCapError(f"Z_{n} exceeds order cap {order_cap}")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"Z{n}", order_cap=order_cap)


def build_direct_product(
    g: FiniteGroup, k: FiniteGroup, *, order_cap: int = DEFAULT_ORDER_CAP
) -> FiniteGroup:
    """G × K with element (i, j) numbered i·|K| + j."""
    n, m = g.order, k.order
    if n * m > order_cap:
        raise OrderCapError(f"|G|·|K| = {n * m} exceeds order cap {order_cap}")
    gi = np.repeat(np.arange(n), m)
    ki = np.tile(np.arange(m), n)
    tab = g.table[np.ix_(gi, gi)] * m + k.table[np.ix_(ki, ki)]
    labels = [f"({a},{b})" for a in g.labels for b in k.labels]
    return FiniteGroup(tab, labels, name=f"{g.name}x{k.name}", order_cap=order_cap)


def build_heisenberg(p: int, *, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Upper unitriangular 3×3 matrices over Z_p.

    The matrix [[1, a, c], [0, 1, b], [0, 0, 1]] is element a·p² + b·p + c;
    the group law is matrix multiplication.
    """
    if not is_prime(p) or p == 2:
        raise ValueError(f"Heisenberg group needs an odd prime, got {p}")
    if p**3 > order_cap:
        raise OrderCapError(f"Heis({p}) has order {p**3} > cap {order_cap}")
    a, b, c = np.divmod(np.arange(p**3), p * p)[0], (np.arange(p**3) // p) % p, np.arange(p**3) % p
    A1, A2 = a[:, None], a[None, :]
    B1, B2 = b[:, None], b[None, :]
    C1, C2 = c[:, None], c[None, :]
    tab = ((A1 + A2) % p) * p * p + ((B1 + B2) % p) * p + (C1 + C2 + A1 * B2) % p
    labels = [f"[{x},{y},{z}]" for x, y, z in zip(a, b, c)]
    return FiniteGroup(tab, labels, name=f"Heis{p}", order_cap=order_cap)


def build_semidirect_cyclic(
    m: int, k: int, r: int, *, order_cap: int = DEFAULT_ORDER_CAP
) -> FiniteGroup:
    """Z_m ⋊ Z_k where the generator of Z_k acts by x ↦ r·x.

    Element (x, i) is numbered x·k + i and (x, i) + (y, j) = (x + r^i·y, i + j).
    """
    from math import gcd

    if m < 1 or k < 1:
        raise ValueError("m and k must be positive")
    if gcd(r, m) != 1 or pow(r, k, m) != 1 % m:
        raise ValueError(f"r={r} does not define an action of Z_{k} on Z_{m}")
    if m * k > order_cap:
        raise OrderCapError(f"order {m * k} exceeds cap {order_cap}")
    x, i = np.divmod(np.arange(m * k), k)
    rpow = np.array([pow(r, e, m) for e in range(k)])
    tab = ((x[:, None] + rpow[i][:, None] * x[None, :]) % m) * k + (i[:, None] + i[None, :]) % k
    labels = [f"({a},{b})" for a, b in zip(x, i)]
    return FiniteGroup(tab, labels, name=f"Z{m}:Z{k}[{r}]", order_cap=order_cap)


def load_cayley(source: str | Path | dict, *, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Build a group from a definition document.

    The document is a JSON object with ``order``, ``table`` (list of rows,
    or a flat row-major list) and optional ``labels`` and ``name``.  A path or
    a JSON string is accepted as well as an already-parsed dict.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        path = Path(text) if not text.lstrip().startswith("{") else None
        try:
            doc = json.loads(path.read_text() if path is not None else text)
        except (OSError, json.JSONDecodeError) as exc:
            raise GroupDefinitionError(f"cannot parse group document: {exc}", kind="parse") from exc
    try:
        n = int(doc["order"])
        table = doc["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupDefinitionError(f"group document needs 'order' and 'table': {exc}", kind="parse") from exc
    arr = np.asarray(table)
    if arr.ndim == 1 and arr.size == n * n:
        arr = arr.reshape(n, n)
    if arr.shape != (n, n):
        raise GroupDefinitionError(
            f"table shape {arr.shape} inconsistent with order {n}", kind="parse"
        )
    return FiniteGroup(arr, doc.get("labels"), name=doc.get("name"), order_cap=order_cap)


def group_document(g: FiniteGroup) -> dict:
    return {"name": g.name, "order": g.order, "table": g.table.tolist(), "labels": list(g.labels)}


# ---------------------------------------------------------------------------
# subgroup machinery


def least_prime_factor(g: FiniteGroup) -> int:
    return g.least_prime_factor


def center(g: FiniteGroup) -> GroupSubset:
    return g.center


def subgroup_generated(g: FiniteGroup, s: GroupSubset | Iterable[int]) -> GroupSubset:
    """Closure of S ∪ {0} under the group law (inverses come for free)."""
    gens = list(s)
    seen = 1
    frontier = [0]
    rows = g._rows
    while frontier:
        nxt = []
        for x in frontier:
            for h in gens:
                y = rows[x][h]
                if not (seen >> y) & 1:
                    seen |= 1 << y
                    nxt.append(y)
        frontier = nxt
    return GroupSubset(g, seen)


def is_subgroup(g: FiniteGroup, h: GroupSubset) -> bool:
    return 0 in h and subgroup_generated(g, h) == h


def _require_subgroup(g: FiniteGroup, h: GroupSubset) -> None:
    if h.group != g:
        raise GroupMismatchError("subset belongs to a different group")
    if not is_subgroup(g, h):
        missing = next(iter(subgroup_generated(g, h) - h), 0)
        raise NotASubgroupError(f"subset is not a subgroup (closure adds {missing})")


def is_normal(g: FiniteGroup, h: GroupSubset) -> bool:
    """True iff -x + H + x = H for every x (H must be a subgroup)."""
    _require_subgroup(g, h)
    members = h.to_list()
    for x in range(g.order):
        nx = g.neg(x)
        for y in members:
            if g.add(g.add(nx, y), x) not in h:
                return False
    return True


def normal_closure(g: FiniteGroup, s: GroupSubset | Iterable[int]) -> GroupSubset:
    """Smallest normal subgroup containing S."""
    gens = set(s)
    while True:
        h = subgroup_generated(g, gens)
        conj = {g.add(g.add(g.neg(x), y), x) for x in range(g.order) for y in gens}
        if conj <= set(h):
            return h
        gens |= conj


def quotient(g: FiniteGroup, h: GroupSubset):
    """G/H for a normal subgroup H, as a :class:`QuotientStructure`."""
    from .morphisms import QuotientStructure

    if not is_normal(g, h):
        raise NotASubgroupError("quotient requires a normal subgroup")
    n = g.order
    projection = [-1] * n
    section: list[int] = []
    members = h.to_list()
    for x in range(n):
        if projection[x] >= 0:
            continue
        c = len(section)
        section.append(x)
        for y in members:
            projection[g.add(x, y)] = c
    k = len(section)
    qtab = [[projection[g.add(section[i], section[j])] for j in range(k)] for i in range(k)]
    qlabels = [f"{g.labels[a]}+H" for a in section]
    qg = FiniteGroup(qtab, qlabels, name=f"{g.name}/H{len(members)}")
    # identity of G lies in coset 0, so normalisation never relabels here
    return QuotientStructure(g, h, qg, tuple(projection), tuple(section))


def is_nilpotent(g: FiniteGroup) -> bool:
    return g.is_nilpotent


def is_solvable(g: FiniteGroup) -> bool:
    return g.is_solvable


def isomorphic_small(g: FiniteGroup, k: FiniteGroup, limit: int = 16) -> bool:
    """Brute-force isomorphism test for tiny groups (tests only).

    Searches for a bijection matching generator images; feasible for
    |G| <= ``limit``.
    """
    if g.order != k.order:
        return False
    if g.order > limit:
        raise OrderCapError(f"isomorphism helper limited to order {limit}")
    if sorted(g.element_orders) != sorted(k.element_orders):
        return False
    from .morphisms import extend_generator_images

    gens = g.generating_set
    cands = [[y for y in range(k.order) if k.element_orders[y] == g.element_orders[x]] for x in gens]

    def search(i: int, imgs: list[int]) -> bool:
        if i == len(gens):
            return extend_generator_images(g, gens, imgs, target=k) is not None
        return any(search(i + 1, imgs + [y]) for y in cands[i])

    return search(0, [])
