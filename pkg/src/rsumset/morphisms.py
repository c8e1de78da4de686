"""Automorphisms, quotients and the field structure induced on a quotient.

Composition follows function notation: ``s.compose(t)`` is ``x ↦ s(t(x))``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    GroupMismatchError,
    NotAnAutomorphismError,
    NotASubgroupError,
    OrderCapError,
    SearchFailure,
)
from .fields import FiniteField, field as get_field, is_irreducible
from .groups import FiniteGroup, GroupSubset, is_normal, quotient, subgroup_generated

log = logging.getLogger(__name__)

AUTOMORPHISM_ORDER_CAP = 128


@dataclass(frozen=True, eq=False)
class Automorphism:
    """A permutation of element indices that respects the group law."""

    group: FiniteGroup
    perm: tuple[int, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(int(x) for x in self.perm))
        if not self.check:
            return
        g, p = self.group, np.asarray(self.perm)
        if len(p) != g.order or len(set(self.perm)) != g.order:
            raise NotAnAutomorphismError("map is not a bijection of the group")
        if p[0] != 0:
            raise NotAnAutomorphismError("identity is not fixed")
        bad = np.argwhere(p[g.table] != g.table[np.ix_(p, p)])
        if bad.size:
            x, y = map(int, bad[0])
            raise NotAnAutomorphismError(f"homomorphism law fails at ({x}, {y})")

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.perm == other.perm and self.group == other.group

    def __hash__(self) -> int:
        return hash(self.perm)

    def __repr__(self) -> str:
        return f"Automorphism(order={self.order}, perm={list(self.perm)})"

    def compose(self, other: Automorphism) -> Automorphism:
        if other.group != self.group:
            raise GroupMismatchError("automorphisms of different groups")
        return Automorphism(self.group, tuple(self.perm[x] for x in other.perm), check=False)

    def inverse(self) -> Automorphism:
        inv = [0] * len(self.perm)
        for x, y in enumerate(self.perm):
            inv[y] = x
        return Automorphism(self.group, tuple(inv), check=False)

    def power(self, k: int) -> Automorphism:
        base = self if k >= 0 else self.inverse()
        acc = identity_automorphism(self.group)
        for _ in range(abs(k)):
            acc = base.compose(acc)
        return acc

    @cached_property
    def order(self) -> int:
        k, cur = 1, self.perm
        ident = tuple(range(len(self.perm)))
        while cur != ident:
            cur = tuple(self.perm[x] for x in cur)
            k += 1
        return k

    @property
    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.perm))

    @cached_property
    def inverse_perm(self) -> tuple[int, ...]:
        return self.inverse().perm


def identity_automorphism(g: FiniteGroup) -> Automorphism:
    return Automorphism(g, tuple(range(g.order)), check=False)


def inner_automorphism(g: FiniteGroup, a: int) -> Automorphism:
    """τ_a(x) = -a + x + a."""
    na = g.neg(a)
    return Automorphism(g, tuple(g.add(g.add(na, x), a) for x in range(g.order)), check=False)


def automorphism_order_parity(sigma: Automorphism) -> tuple[int, bool]:
    """(order, is_even)."""
    return sigma.order, sigma.order % 2 == 0


def apply(sigma: Automorphism, a: GroupSubset) -> GroupSubset:
    """σ(A) = {σ(x) : x ∈ A}."""
    if a.group != sigma.group:
        raise GroupMismatchError("subset and automorphism belong to different groups")
    bits = 0
    for x in a:
        bits |= 1 << sigma.perm[x]
    return GroupSubset(a.group, bits)


def multiplication_automorphism(g: FiniteGroup, k: int) -> Automorphism:
    """x ↦ k·x; an automorphism only when g is abelian and gcd(k, exponent) = 1."""
    k %= g.order
    return Automorphism(g, tuple(g.multiple(k, x) for x in range(g.order)))


# ---------------------------------------------------------------------------
# enumeration


def _cayley_tree(g: FiniteGroup, gens: Sequence[int]) -> list[tuple[int, int, int]]:
    """BFS spanning tree of the right Cayley graph: (x, parent, generator index)."""
    seen = {0}
    order = []
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for i, h in enumerate(gens):
                y = g.add(x, h)
                if y not in seen:
                    seen.add(y)
                    order.append((y, x, i))
                    nxt.append(y)
        frontier = nxt
    if len(seen) != g.order:
        raise ValueError("generators do not generate the group")
    return order


def extend_generator_images(
    g: FiniteGroup,
    gens: Sequence[int],
    images: Sequence[int],
    *,
    target: FiniteGroup | None = None,
    tree: list[tuple[int, int, int]] | None = None,
) -> tuple[int, ...] | None:
    """Extend generator images to a homomorphism G -> target, if one exists.

    Returns the image table when the extension is well defined and bijective,
    otherwise ``None``.  Consistency of f(x + h) = f(x) + f(h) over every
    element x and generator h is enough for f to be a homomorphism.
    """
    t = target if target is not None else g
    if tree is None:
        tree = _cayley_tree(g, gens)
    f = [-1] * g.order
    f[0] = 0
    trows = t._rows
    for y, x, i in tree:
        f[y] = trows[f[x]][images[i]]
    rows = g._rows
    for x in range(g.order):
        fx = trows[f[x]]
        rx = rows[x]
        for h, img in zip(gens, images):
            if f[rx[h]] != fx[img]:
                return None
    if len(set(f)) != t.order or t.order != g.order:
        return None
    return tuple(f)


def _cache_file(cache_dir: Path, g: FiniteGroup) -> Path:
    return Path(cache_dir) / f"aut-{g.content_hash}.json"


def save_automorphism_cache(cache_dir: Path | str, g: FiniteGroup, auts: Sequence[Automorphism]) -> Path:
    path = _cache_file(Path(cache_dir), g)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "group_hash": g.content_hash,
        "group_order": g.order,
        "count": len(auts),
        "automorphisms": [{"perm": list(s.perm), "order": s.order} for s in auts],
    }
    path.write_text(json.dumps(doc))
    return path


def load_automorphism_cache(cache_dir: Path | str, g: FiniteGroup) -> list[Automorphism] | None:
    path = _cache_file(Path(cache_dir), g)
    if not path.exists():
        return None
    doc = json.loads(path.read_text())
    if doc.get("group_hash") != g.content_hash:
        return None
    auts = [Automorphism(g, tuple(e["perm"])) for e in doc["automorphisms"]]
    for s, e in zip(auts, doc["automorphisms"]):
        if s.order != e["order"]:
            raise ValueError(f"cached order mismatch in {path}")
    return auts


def enumerate_automorphisms(
    g: FiniteGroup,
    *,
    cap: int = AUTOMORPHISM_ORDER_CAP,
    cache_dir: Path | str | None = None,
) -> list[Automorphism]:
    """All automorphisms of ``g``, sorted by permutation.

    Backtracks over images of a greedy generating set, keeping only images of
    matching element order.  Groups above ``cap`` are accepted when they have
    a generating set of at most three elements.
    """
    gens = g.generating_set
    if g.order > cap and len(gens) > 3:
        raise OrderCapError(f"automorphism enumeration capped at order {cap}")
    if cache_dir is not None:
        cached = load_automorphism_cache(cache_dir, g)
        if cached is not None:
            return cached

    tree = _cayley_tree(g, gens)
    orders = g.element_orders
    cands = [[y for y in range(g.order) if orders[y] == orders[h]] for h in gens]
    found: list[tuple[int, ...]] = []

    def search(i: int, imgs: list[int]) -> None:
        if i == len(gens):
            f = extend_generator_images(g, gens, imgs, tree=tree)
            if f is not None:
                found.append(f)
            return
        for y in cands[i]:
            # images of generators must generate distinct subgroups in the same way;
            # a repeated image can never extend to a bijection
            if y in imgs:
                continue
            search(i + 1, imgs + [y])

    search(0, [])
    found.sort()
    auts = [Automorphism(g, f) for f in found]
    _verify_closure(auts)
    log.debug("enumerated %d automorphisms of %s", len(auts), g.name)
    if cache_dir is not None:
        save_automorphism_cache(cache_dir, g, auts)
    return auts


def _verify_closure(auts: Sequence[Automorphism]) -> None:
    perms = {s.perm for s in auts}
    n = len(auts)
    if n * n <= 250_000:
        probes = list(auts)
    else:
        # a handful of evenly spaced probes; exhaustive closure is quadratic
        probes = list(auts[:: max(1, n // 8)])
    for s in auts:
        if s.inverse().perm not in perms:
            raise SearchFailure("automorphism set not closed under inversion")
        for t in probes:
            if s.compose(t).perm not in perms:
                raise SearchFailure("automorphism set not closed under composition")


def odd_order_automorphisms(auts: Iterable[Automorphism]) -> list[Automorphism]:
    return [s for s in auts if s.order % 2 == 1]


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True, eq=False)
class QuotientStructure:
    """G/H with the projection x ↦ x + H and a fixed coset section."""

    parent: FiniteGroup
    normal_subgroup: GroupSubset
    quotient: FiniteGroup
    projection: tuple[int, ...]
    section: tuple[int, ...]

    def project(self, x: int) -> int:
        return self.projection[x]

    def project_set(self, a: GroupSubset) -> GroupSubset:
        return self.quotient.subset(self.projection[x] for x in a)

    def coset(self, c: int) -> GroupSubset:
        return self.parent.subset(x for x, k in enumerate(self.projection) if k == c)


def restrict_to_quotient(sigma: Automorphism, q: QuotientStructure) -> Automorphism:
    """The automorphism σ̄ of G/H induced by σ; requires σ(H) = H."""
    if sigma.group != q.parent:
        raise GroupMismatchError("automorphism and quotient have different parents")
    h = q.normal_subgroup
    if apply(sigma, h) != h:
        raise NotASubgroupError("automorphism does not stabilise the normal subgroup")
    perm = tuple(q.projection[sigma(a)] for a in q.section)
    for x in range(q.parent.order):
        if q.projection[sigma(x)] != perm[q.projection[x]]:
            raise SearchFailure("induced map is not well defined")
    return Automorphism(q.quotient, perm)


# ---------------------------------------------------------------------------
# field structure on an elementary abelian quotient


@dataclass(frozen=True)
class FieldStructure:
    """χ: G/H -> F_{p^α} with χ(σ̄(x)) = γ·χ(x)."""

    p: int
    alpha: int
    gamma: int
    chi: tuple[int, ...]
    field: FiniteField = field(repr=False)

    @property
    def gamma_coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.gamma)


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    m = [r[:] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] % p), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [v * inv % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] % p:
                c = m[i][col]
                m[i] = [(a - c * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _solve_mod_p(a: list[list[int]], b: list[list[int]], p: int) -> list[list[int]]:
    """X with X·A = B for square invertible A (row-vector convention via transpose)."""
    n = len(a)
    # work with columns: A is n×n with basis vectors as columns
    aug = [[a[i][j] for j in range(n)] + [0] * n for i in range(n)]
    for i in range(n):
        aug[i][n + i] = 1
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] % p)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [v * inv % p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] % p:
                c = aug[i][col]
                aug[i] = [(x - c * y) % p for x, y in zip(aug[i], aug[col])]
    a_inv = [row[n:] for row in aug]
    return [[sum(b[i][k] * a_inv[k][j] for k in range(n)) % p for j in range(n)] for i in range(len(b))]


def _elementary_abelian_prime(g: FiniteGroup) -> int | None:
    if g.order < 2 or not g.is_abelian:
        return None
    p = g.least_prime_factor
    if all(o == p for o in g.element_orders[1:]):
        return p
    return None


def _coordinates(g: FiniteGroup, p: int) -> tuple[list[int], list[tuple[int, ...]]]:
    """A basis of an elementary abelian p-group and coordinates of every element."""
    basis: list[int] = []
    span = g.subset([0])
    for x in range(1, g.order):
        if x not in span:
            basis.append(x)
            span = subgroup_generated(g, basis)
            if len(span) == g.order:
                break
    coords: list[tuple[int, ...] | None] = [None] * g.order
    for vec in np.ndindex(*([p] * len(basis))):
        x = 0
        for c, e in zip(vec, basis):
            x = g.add(x, g.multiple(int(c), e))
        coords[x] = tuple(int(c) for c in vec)
    assert all(c is not None for c in coords)
    return basis, coords  # type: ignore[return-value]


def _matrix_power_rows(m: list[list[int]], k: int, p: int) -> list[list[int]]:
    n = len(m)
    acc = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(k):
        acc = [[sum(acc[i][t] * m[t][j] for t in range(n)) % p for j in range(n)] for i in range(n)]
    return acc


def _minimal_polynomial(m: list[list[int]], p: int) -> tuple[int, ...]:
    """Monic minimal polynomial of a square matrix over F_p (low degree first)."""
    n = len(m)
    powers = [_matrix_power_rows(m, 0, p)]
    for d in range(1, n + 1):
        powers.append(_matrix_power_rows(m, d, p))
        flat = [[v for row in pw for v in row] for pw in powers]
        if _rank_mod_p(flat, p) < len(flat):
            # solve Σ c_i M^i = -M^d for c_0..c_{d-1}
            for coeffs in np.ndindex(*([p] * d)):
                total = [[powers[d][i][j] for j in range(n)] for i in range(n)]
                for c, pw in zip(coeffs, powers[:d]):
                    if c:
                        total = [[(total[i][j] + int(c) * pw[i][j]) % p for j in range(n)] for i in range(n)]
                if not any(v for row in total for v in row):
                    return (*(int(c) for c in coeffs), 1)
    raise SearchFailure("no minimal polynomial found")


def field_structure_on_quotient(sigma_bar: Automorphism) -> FieldStructure | None:
    """Field structure on an elementary abelian group making σ̄ scalar, if any.

    σ̄ is F_p-linear; it acts as multiplication by some γ exactly when its
    minimal polynomial is irreducible.  χ then maps an F_p[σ̄]-basis of the
    group onto an F_p(γ)-basis of F_{p^α}.
    """
    q = sigma_bar.group
    p = _elementary_abelian_prime(q)
    if p is None:
        return None
    basis, coords = _coordinates(q, p)
    alpha = len(basis)
    # column j of the matrix = coordinates of σ̄(e_j); stored row-major as M[i][j]
    mat = [[coords[sigma_bar(e)][i] for e in basis] for i in range(alpha)]
    minpoly = _minimal_polynomial(mat, p)
    if not is_irreducible(minpoly, p):
        return None
    d = len(minpoly) - 1
    fld = get_field(p, alpha)
    gamma = next((x for x in range(1, fld.order) if fld.minimal_polynomial(x) == minpoly), None)
    if gamma is None:
        raise SearchFailure(f"no root of {minpoly} in {fld}")

    def mat_vec(v: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sum(mat[i][j] * v[j] for j in range(alpha)) % p for i in range(alpha))

    src: list[tuple[int, ...]] = []
    for x in range(1, q.order):
        if _rank_mod_p([list(v) for v in src] + [list(coords[x])], p) > len(src):
            v = coords[x]
            for _ in range(d):
                src.append(v)
                v = mat_vec(v)
        if len(src) == alpha:
            break
    dst: list[tuple[int, ...]] = []
    for w in range(1, fld.order):
        if _rank_mod_p([list(v) for v in dst] + [list(fld.coeffs(w))], p) > len(dst):
            for _ in range(d):
                dst.append(fld.coeffs(w))
                w = fld.mul(gamma, w)
        if len(dst) == alpha:
            break
    # chi as a matrix X with X·src_k = dst_k; columns of A are the src vectors
    a_cols = [[src[k][i] for k in range(alpha)] for i in range(alpha)]
    b_cols = [[dst[k][i] for k in range(alpha)] for i in range(alpha)]
    x_mat = _solve_mod_p(a_cols, b_cols, p)
    chi = tuple(
        fld.from_coeffs(sum(x_mat[i][j] * coords[e][j] for j in range(alpha)) % p for i in range(alpha))
        for e in range(q.order)
    )
    fs = FieldStructure(p, alpha, gamma, chi, fld)
    verify_field_structure(fs, sigma_bar)
    return fs


def verify_field_structure(fs: FieldStructure, sigma_bar: Automorphism) -> None:
    """Re-check the three defining properties pointwise; raises on failure."""
    q, fld = sigma_bar.group, fs.field
    if fs.gamma == 0:
        raise SearchFailure("gamma is zero")
    if len(set(fs.chi)) != q.order or q.order != fld.order:
        raise SearchFailure("chi is not a bijection")
    for x in range(q.order):
        for y in range(q.order):
            if fs.chi[q.add(x, y)] != fld.add(fs.chi[x], fs.chi[y]):
                raise SearchFailure("chi is not additive")
        if fs.chi[sigma_bar(x)] != fld.mul(fs.gamma, fs.chi[x]):
            raise SearchFailure("chi does not intertwine sigma with multiplication by gamma")


def invariant_normal_subgroups(g: FiniteGroup, sigma: Automorphism) -> list[GroupSubset]:
    """All σ-invariant normal subgroups, built as joins of minimal ones."""
    from .groups import normal_closure

    found: dict[int, GroupSubset] = {1: g.subset([0])}
    atoms: dict[int, GroupSubset] = {}
    for x in range(1, g.order):
        orbit = {x}
        y = sigma(x)
        while y not in orbit:
            orbit.add(y)
            y = sigma(y)
        h = normal_closure(g, orbit)
        atoms[h.bits] = h
    found.update(atoms)
    frontier = list(atoms.values())
    while frontier:
        nxt = []
        for h in frontier:
            for k in atoms.values():
                j = subgroup_generated(g, h | k)
                if j.bits not in found:
                    found[j.bits] = j
                    nxt.append(j)
        frontier = nxt
    return list(found.values())


def find_bw_subgroup(
    g: FiniteGroup, sigma: Automorphism
) -> tuple[QuotientStructure, FieldStructure]:
    """A proper normal σ-invariant H with G/H a field on which σ acts by scalars.

    Among qualifying H the largest is returned, ties going to the
    lexicographically least sorted element list.
    """
    if sigma.group != g:
        raise GroupMismatchError("automorphism belongs to another group")
    if g.order < 2:
        raise ValueError("group must be non-trivial")
    cands = [h for h in invariant_normal_subgroups(g, sigma) if len(h) < g.order]
    cands.sort(key=lambda h: (-len(h), h.to_list()))
    for h in cands:
        q = quotient(g, h)
        if _elementary_abelian_prime(q.quotient) is None:
            continue
        sbar = restrict_to_quotient(sigma, q)
        fs = field_structure_on_quotient(sbar)
        if fs is not None:
            return q, fs
    raise SearchFailure(
        f"no invariant subgroup with field quotient in {g.name}"
        + ("" if g.is_solvable else " (group is not solvable)")
    )
