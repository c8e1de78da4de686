import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsumset.catalog import UnknownGroupError, get_group, listing
from rsumset.errors import GroupDefinitionError, GroupMismatchError, NotASubgroupError, OrderCapError
from rsumset.groups import (
    FiniteGroup,
    TrivialGroupError,
    build_cyclic,
    build_direct_product,
    build_heisenberg,
    build_semidirect_cyclic,
    group_document,
    is_normal,
    is_subgroup,
    isomorphic_small,
    load_cayley,
    normal_closure,
    quotient,
    subgroup_generated,
)

from . import oracles

TEST_GROUPS = ["Z1", "Z2", "Z5", "Z6", "Z9", "Z12", "Z2xZ2", "Z3xZ3", "Z2^3", "Q8", "D4", "S3", "F21", "Heis3"]


@pytest.fixture(params=TEST_GROUPS)
def group(request):
    return get_group(request.param)


# -- constructors --------------------------------------------------------


def test_cyclic_examples():
    z1 = build_cyclic(1)
    assert z1.order == 1 and z1.table.tolist() == [[0]]
    z5 = build_cyclic(5)
    assert z5.add(3, 4) == 2 and z5.neg(2) == 3
    assert build_cyclic(9).least_prime_factor == 3
    with pytest.raises(OrderCapError):
        build_cyclic(300)
    assert build_cyclic(300, order_cap=512).order == 300


def test_cyclic_matches_modular_arithmetic():
    g = build_cyclic(12)
    for x, y in itertools.product(range(12), repeat=2):
        assert g.add(x, y) == (x + y) % 12


def test_direct_product_examples():
    v4 = build_direct_product(build_cyclic(2), build_cyclic(2))
    assert all(v4.element_order(x) == 2 for x in range(1, 4))
    z33 = build_direct_product(build_cyclic(3), build_cyclic(3))
    assert z33.order == 9 and z33.least_prime_factor == 3
    z23 = build_direct_product(build_cyclic(2), build_cyclic(3))
    assert sorted(set(oracles.element_order(z23, x) for x in range(6))) == [1, 2, 3, 6]
    assert isomorphic_small(z23, build_cyclic(6))


def test_direct_product_componentwise_numbering():
    g = build_direct_product(build_cyclic(3), build_cyclic(4))
    for x, y in itertools.product(range(12), repeat=2):
        (i1, j1), (i2, j2) = divmod(x, 4), divmod(y, 4)
        assert g.add(x, y) == ((i1 + i2) % 3) * 4 + (j1 + j2) % 4


@pytest.mark.parametrize("p", [3, 5])
def test_heisenberg_is_matrix_multiplication(p):
    g = build_heisenberg(p)
    rng = np.random.default_rng(0)
    pairs = itertools.product(range(g.order), repeat=2) if p == 3 else rng.integers(0, g.order, (3000, 2))
    for x, y in pairs:
        prod = (oracles.heis_matrix(p, int(x)) @ oracles.heis_matrix(p, int(y))) % p
        assert np.array_equal(oracles.heis_matrix(p, g.add(int(x), int(y))), prod)


def test_heisenberg_examples():
    h3 = build_heisenberg(3)
    assert h3.order == 27 and not h3.is_abelian and h3.is_nilpotent
    assert h3.nilpotency_class == 2
    # commutation scan straight from the table
    central = [x for x in range(27) if all(h3.table[x, y] == h3.table[y, x] for y in range(27))]
    assert len(central) == 3 and h3.center.to_list() == central
    assert build_heisenberg(5).least_prime_factor == 5
    with pytest.raises(ValueError):
        build_heisenberg(2)
    with pytest.raises(ValueError):
        build_heisenberg(9)


def test_semidirect_examples():
    f21 = build_semidirect_cyclic(7, 3, 2)
    assert f21.order == 21 and not f21.is_abelian
    assert not f21.is_nilpotent and f21.is_solvable
    assert f21.center.to_list() == [0]
    z7 = build_semidirect_cyclic(7, 1, 1)
    assert isomorphic_small(z7, build_cyclic(7))
    g20 = build_semidirect_cyclic(5, 4, 2)
    assert g20.order == 20 and g20.least_prime_factor == 2
    with pytest.raises(ValueError):
        build_semidirect_cyclic(7, 3, 3)  # 3^3 = 27 ≢ 1 (mod 7)
    with pytest.raises(ValueError):
        build_semidirect_cyclic(6, 2, 2)  # gcd(2, 6) ≠ 1


def test_semidirect_action():
    g = build_semidirect_cyclic(7, 3, 2)
    for x, y in itertools.product(range(21), repeat=2):
        (a, i), (b, j) = divmod(x, 3), divmod(y, 3)
        assert g.add(x, y) == ((a + pow(2, i, 7) * b) % 7) * 3 + (i + j) % 3


def test_identity_is_normalised_to_zero():
    # Z3 written with the identity at index 2
    tab = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    g = FiniteGroup(tab, labels=["a", "b", "e"])
    assert g.labels[0] == "e"
    assert all(g.add(0, x) == x == g.add(x, 0) for x in range(3))
    assert isomorphic_small(g, build_cyclic(3))


# -- validation ----------------------------------------------------------


def test_load_cayley_z2_and_flat_table():
    g = load_cayley({"order": 2, "table": [[0, 1], [1, 0]]})
    assert isomorphic_small(g, build_cyclic(2))
    assert load_cayley(json.dumps({"order": 2, "table": [0, 1, 1, 0]})).order == 2


def test_load_cayley_latin_witness():
    with pytest.raises(GroupDefinitionError) as exc:
        load_cayley({"order": 2, "table": [[0, 1], [1, 1]]})
    assert exc.value.kind == "latin"
    assert exc.value.witness[0] == 1


def test_load_cayley_s3_document(tmp_path):
    # S3 as permutations of {0, 1, 2}, composed left to right
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(q[p[k]] for k in range(3))] for q in perms] for p in perms]
    path = tmp_path / "s3.json"
    path.write_text(json.dumps({"order": 6, "table": table, "name": "S3"}))
    g = load_cayley(path)
    assert g.order == 6 and not g.is_abelian
    assert isomorphic_small(g, get_group("S3"))


def test_load_cayley_rejections():
    with pytest.raises(GroupDefinitionError) as exc:
        load_cayley("{not json")
    assert exc.value.kind == "parse"
    with pytest.raises(GroupDefinitionError) as exc:
        load_cayley({"order": 3, "table": [[0, 1], [1, 0]]})
    assert exc.value.kind == "parse"
    with pytest.raises(GroupDefinitionError) as exc:
        load_cayley({"order": 2, "table": [[0, 5], [1, 0]]})
    assert exc.value.kind == "range"


def test_associativity_witness():
    # a Latin square with identity 0 and inverses that is not associative (a loop of order 5)
    tab = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupDefinitionError) as exc:
        FiniteGroup(tab)
    assert exc.value.kind == "associativity"
    x, y, z = exc.value.witness
    assert tab[tab[x][y]][z] != tab[x][tab[y][z]]


def test_missing_identity():
    tab = [[1, 0], [0, 1]]  # identity is 1, fine
    assert FiniteGroup(tab).order == 2
    with pytest.raises(GroupDefinitionError) as exc:
        FiniteGroup([[1, 2, 0], [2, 0, 1], [1, 2, 0]])
    assert exc.value.kind == "latin"


def test_document_round_trip(group):
    again = load_cayley(group_document(group))
    assert np.array_equal(again.table, group.table)
    assert again.content_hash == group.content_hash


# -- invariants ----------------------------------------------------------


def test_table_axioms(group):
    n = group.order
    t = group.table
    full = list(range(n))
    assert all(sorted(t[r]) == full for r in range(n))
    assert all(sorted(t[:, c]) == full for c in range(n))
    assert all(t[0, x] == x == t[x, 0] for x in range(n))
    assert all(t[x, group.inv[x]] == 0 == t[group.inv[x], x] for x in range(n))
    for x, y, z in itertools.product(range(n), repeat=3) if n <= 27 else []:
        assert t[t[x, y], z] == t[x, t[y, z]]


def test_cached_invariants_match_recomputation(group):
    n = group.order
    assert group.is_abelian == all(group.table[x, y] == group.table[y, x] for x in range(n) for y in range(n))
    center = [x for x in range(n) if all(group.table[x, y] == group.table[y, x] for y in range(n))]
    assert group.center.to_list() == center
    if n > 1:
        p = group.least_prime_factor
        assert p == oracles.least_prime(n)
        assert n % p == 0 and all(n % q for q in range(2, p))
    else:
        with pytest.raises(TrivialGroupError):
            group.least_prime_factor
    assert group.element_orders == tuple(oracles.element_order(group, x) for x in range(n))


def test_center_normal_and_series(group):
    assert is_normal(group, group.center)
    assert (len(group.center) == group.order) == group.is_abelian
    if group.is_nilpotent:
        assert group.is_solvable
    if group.is_abelian:
        assert group.is_nilpotent


def test_nilpotency_flags():
    flags = {name: (get_group(name).is_nilpotent, get_group(name).is_solvable) for name in TEST_GROUPS}
    assert flags["S3"] == (False, True)
    assert flags["F21"] == (False, True)
    assert flags["Q8"] == flags["D4"] == flags["Heis3"] == (True, True)


def test_subgroup_generated_examples():
    z9 = build_cyclic(9)
    assert subgroup_generated(z9, []).to_list() == [0]
    assert subgroup_generated(z9, [3]).to_list() == [0, 3, 6]
    h3 = build_heisenberg(3)
    x, y = 9, 3  # the matrices with a = 1 and with b = 1
    assert h3.add(x, y) != h3.add(y, x)
    assert len(subgroup_generated(h3, [x, y])) == 27


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["Z12", "Q8", "D4", "F21", "Heis3"]), st.sets(st.integers(0, 26), max_size=3),
       st.sets(st.integers(0, 26), max_size=3))
def test_subgroup_generated_idempotent_monotone(name, s, t):
    g = get_group(name)
    s = {x % g.order for x in s}
    t = {x % g.order for x in t}
    h = subgroup_generated(g, s)
    assert subgroup_generated(g, h) == h
    assert is_subgroup(g, h)
    assert h <= subgroup_generated(g, s | t)


def test_is_normal_examples():
    f21 = build_semidirect_cyclic(7, 3, 2)
    k = subgroup_generated(f21, [1])  # (0, 1) generates an order-3 complement
    assert len(k) == 3 and not is_normal(f21, k)
    assert is_normal(f21, subgroup_generated(f21, [3]))  # the Z7 part
    z12 = build_cyclic(12)
    assert all(is_normal(z12, subgroup_generated(z12, [d])) for d in range(12))
    with pytest.raises(NotASubgroupError):
        is_normal(z12, z12.subset([0, 1]))
    assert normal_closure(f21, [1]).to_list() == list(range(21))


def test_quotient_examples():
    z9 = build_cyclic(9)
    q = quotient(z9, z9.subset([0, 3, 6]))
    assert isomorphic_small(q.quotient, build_cyclic(3))
    assert quotient(z9, z9.full_set()).quotient.order == 1
    h3 = build_heisenberg(3)
    qh = quotient(h3, h3.center)
    assert isomorphic_small(qh.quotient, get_group("Z3xZ3"))
    with pytest.raises(NotASubgroupError):
        quotient(get_group("F21"), subgroup_generated(get_group("F21"), [1]))


@pytest.mark.parametrize("name", ["Z12", "Q8", "D4", "Heis3", "F21"])
def test_quotient_projection_is_homomorphism(name):
    g = get_group(name)
    for h in [g.center, subgroup_generated(g, [g.commutator(x, y) for x in range(g.order) for y in range(g.order)])]:
        q = quotient(g, h)
        proj = q.projection
        for x, y in itertools.product(range(g.order), repeat=2):
            assert proj[g.add(x, y)] == q.quotient.add(proj[x], proj[y])
        assert all(proj[q.section[c]] == c for c in range(q.quotient.order))
        # the projection is constant exactly on cosets x + H
        for x in range(g.order):
            coset = {g.add(x, y) for y in h}
            assert {z for z in range(g.order) if proj[z] == proj[x]} == coset


def test_subset_operations():
    g = build_cyclic(8)
    a, b = g.subset([1, 2, 3]), g.subset([3, 4])
    assert (a | b).to_list() == [1, 2, 3, 4]
    assert (a & b).to_list() == [3]
    assert (a - b).to_list() == [1, 2]
    assert g.subset([3]) <= a
    assert repr(a) == "{1, 2, 3}"
    assert a.to_hex() == "0e"
    assert a.membership().tolist() == [False, True, True, True, False, False, False, False]
    with pytest.raises(GroupMismatchError):
        a | build_cyclic(9).subset([1])
    with pytest.raises(ValueError):
        g.subset([8])


def test_catalog():
    for name in ["Z9", "Z2xZ4", "Z2^3", "Z3xZ3", "Heis3", "Heis5", "F21", "Q8", "D4"]:
        g = get_group(name)
        assert g.name == name
    assert get_group("Z2^3").order == 8 and get_group("Z2^3").is_abelian
    q8 = get_group("Q8")
    assert sorted(q8.element_orders) == [1, 2, 4, 4, 4, 4, 4, 4]
    d4 = get_group("D4")
    assert sorted(d4.element_orders) == [1, 2, 2, 2, 2, 2, 4, 4]
    assert not isomorphic_small(q8, d4)
    with pytest.raises(UnknownGroupError) as exc:
        get_group("Nope")
    assert "Heis3" in str(exc.value)
    with pytest.raises(UnknownGroupError):
        get_group("Z500")
    small = listing(12)
    assert "Z12" in small and "Q8" in small and "Heis3" not in small
    assert all(get_group(nm).order <= 12 for nm in small)
