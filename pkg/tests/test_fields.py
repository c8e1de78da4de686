import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsumset.errors import OrderCapError, PreconditionError
from rsumset.fields import (
    MODULI,
    FiniteField,
    binomial_lucas,
    binomial_mod,
    field,
    is_irreducible,
    require_nonzero_gamma,
)
from rsumset.nullstellensatz import (
    anr_coefficient,
    expansion_oracle_coefficient,
    gamma_restricted_sumset,
    verify_field_lemma,
)

from . import oracles

SMALL_FIELDS = sorted(k for k in MODULI if k[0] ** k[1] <= 49)


# -- field arithmetic ----------------------------------------------------


def test_modulus_table_covers_all_small_prime_powers():
    for p in [2, 3, 5, 7, 11]:
        for a in range(1, 8):
            if p**a <= 125:
                assert (p, a) in MODULI
                assert is_irreducible(MODULI[(p, a)], p)


def test_irreducibility_by_brute_force():
    # a polynomial of degree d is reducible iff it has a monic factor of degree <= d/2;
    # compare against multiplying out every pair of monic polynomials
    p = 3
    for d in (2, 3, 4):
        reducible = set()
        for k in range(1, d // 2 + 1):
            for lo1 in itertools.product(range(p), repeat=k):
                for lo2 in itertools.product(range(p), repeat=d - k):
                    f1, f2 = [*lo1, 1], [*lo2, 1]
                    prod = [0] * (d + 1)
                    for i, x in enumerate(f1):
                        for j, y in enumerate(f2):
                            prod[i + j] = (prod[i + j] + x * y) % p
                    reducible.add(tuple(prod))
        for lo in itertools.product(range(p), repeat=d):
            f = (*lo, 1)
            assert is_irreducible(f, p) == (f not in reducible)


@pytest.mark.parametrize("pa", SMALL_FIELDS)
def test_field_axioms_exhaustive(pa):
    f = field(*pa)
    q = f.order
    add, mul = f.add_table, f.mul_table
    idx = np.arange(q)
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert np.array_equal(add[add[a, b], c], add[a, add[b, c]])
    assert np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]])
    assert np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]])
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert all(add[x, f.neg_table[x]] == 0 for x in range(q))
    assert all(mul[x, f.inv_table[x]] == 1 for x in range(1, q))
    # the multiplicative group is cyclic
    assert max(f.multiplicative_order(x) for x in range(1, q)) == q - 1


def test_prime_field_is_modular_arithmetic():
    f = field(13)
    for x, y in itertools.product(range(13), repeat=2):
        assert f.add(x, y) == (x + y) % 13 and f.mul(x, y) == (x * y) % 13


def test_coordinates_and_minimal_polynomials():
    f = field(3, 2)
    assert f.coeffs(5) == (2, 1) and f.from_coeffs((2, 1)) == 5
    # x itself (index p) has the modulus as its minimal polynomial
    assert f.minimal_polynomial(3) == f.modulus
    for x in range(f.order):
        mp = f.minimal_polynomial(x)
        # evaluate mp at x inside the field
        acc = 0
        for c in reversed(mp):
            acc = f.add(f.mul(acc, x), f.from_int(c))
        assert acc == 0


def test_field_rejections():
    with pytest.raises(ValueError):
        FiniteField(4)
    assert FiniteField(3, 2, modulus=(1, 0, 1)).order == 9  # x^2 + 1 has no root mod 3
    with pytest.raises(ValueError):
        FiniteField(5, 2, modulus=(4, 0, 1))  # x^2 - 1 = (x - 1)(x + 1)
    with pytest.raises(PreconditionError):
        require_nonzero_gamma(field(5), 0)


@given(st.integers(0, 60), st.integers(-2, 62), st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_binomials_agree(n, k, p):
    want = comb(n, k) % p if 0 <= k <= n else 0
    assert binomial_mod(n, k, p) == want == binomial_lucas(n, k, p)


# -- γ-restricted sumsets -----------------------------------------------


def test_gamma_sumset_examples():
    f5 = field(5)
    # both (2, 1) and (1, 3) are excluded since 2 = 2*1 and 1 = 2*3 in F_5
    assert gamma_restricted_sumset(f5, [1, 2], [1, 3], 2) == {2, 0}
    assert {(x + y) % 5 for x in (1, 2) for y in (1, 3) if x != (2 * y) % 5} == {2, 0}
    assert gamma_restricted_sumset(f5, [], [1], 2) == frozenset()
    a, b = [0, 1, 3], [1, 3, 4]
    assert gamma_restricted_sumset(f5, a, b, 1) == {(x + y) % 5 for x in a for y in b if x != y}


# -- coefficient formula -------------------------------------------------


def test_coefficient_examples():
    c = anr_coefficient(field(7), 3, 3, 2)
    assert c.value == 4 and c.nonzero
    c = anr_coefficient(field(11), 4, 4, 3)
    assert c.value == 2 and c.nonzero
    for p in (5, 7, 11):
        for m in range(2, (p + 2) // 2 + 1):
            assert anr_coefficient(field(p), m, m, 1).value == 0
    f7 = field(7)
    assert expansion_oracle_coefficient(f7, 2, 2, 0) == 1
    for g in range(7):
        assert expansion_oracle_coefficient(f7, 3, 2, g) == (2 - g) % 7
    with pytest.raises(PreconditionError):
        anr_coefficient(field(5), 4, 4, 2)
    with pytest.raises(PreconditionError):
        anr_coefficient(field(5), 1, 3, 2)
    with pytest.raises(OrderCapError):
        expansion_oracle_coefficient(field(13), 14, 13, 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_coefficient_matches_expansion_cross_product(p):
    f = field(p)
    for m, n in itertools.product(range(2, 7), repeat=2):
        for g in range(p):
            formula = anr_coefficient(f, m, n, g, strict=False).value
            expanded = expansion_oracle_coefficient(f, m, n, g)
            from_x, from_y = oracles.poly_coefficient(p, f.mul, g, m, n)
            assert formula == expanded == f.sub(from_x, from_y)


@pytest.mark.parametrize("pa", [(3, 2), (5, 2), (2, 3)])
def test_coefficient_matches_expansion_extension_fields(pa):
    f = field(*pa)
    for m, n in itertools.product(range(2, 5), repeat=2):
        for g in range(f.order):
            assert anr_coefficient(f, m, n, g, strict=False).value == expansion_oracle_coefficient(f, m, n, g)


def test_product_over_s_only_touches_lower_degrees():
    f = field(7)
    rng = np.random.default_rng(1)
    for _ in range(50):
        m, n = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        s = rng.choice(7, int(rng.integers(0, m + n - 2)), replace=False).tolist()
        g = int(rng.integers(0, 7))
        assert expansion_oracle_coefficient(f, m, n, g, s) == anr_coefficient(f, m, n, g, strict=False).value


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_coefficient_nonzero_on_diagonal(p):
    f = field(p)
    for m in range(2, p // 2 + 2):
        if 2 * m - 2 > p:
            continue
        for g in range(2, p):
            assert anr_coefficient(f, m, m, g).nonzero


# -- the bound itself ----------------------------------------------------


def test_field_lemma_f5():
    rep = verify_field_lemma(field(5), 2)
    assert rep.status == "PASS"
    assert rep.instances_checked == 3 * (comb(5, 1) ** 2 + comb(5, 2) ** 2)
    assert rep.counters["observed_minimum_by_size"]["1"] == 0


def test_field_lemma_brute_force_agrees():
    f = field(7)
    rep = verify_field_lemma(f, 2, gammas=[3])
    worst = min(
        len({(x + y) % 7 for x in a for y in b if x != (3 * y) % 7})
        for a in itertools.combinations(range(7), 2)
        for b in itertools.combinations(range(7), 2)
    )
    assert rep.counters["observed_minimum_by_size"]["2"] == worst >= 2


def test_field_lemma_extension_field():
    rep = verify_field_lemma(field(3, 2), 2)
    assert rep.status == "PASS"


def test_field_lemma_sampling_is_seeded():
    a = verify_field_lemma(field(11), 3, sample_above=2000, seed=4)
    b = verify_field_lemma(field(11), 3, sample_above=2000, seed=4)
    assert a.plan.mode == "sampled"
    assert a.to_dict() == b.to_dict() and a.status == "PASS"


@pytest.mark.parametrize("p", [3, 5, 7])
def test_field_lemma_holds_in_proof_range(p):
    # the bound can fail only when 2|A| - 2 > p; there γ = -1 with A = B = F_p
    # misses exactly the sum 0, leaving p - 1 elements
    rep = verify_field_lemma(field(p), p, gammas=range(2, p))
    assert rep.counters["violations_in_proof_range"] == 0
    for v in rep.violations:
        assert 2 * len(v.a) - 2 > p and v.extra["gamma"] == p - 1 and v.lhs == p - 1
    full = list(range(p))
    assert len(gamma_restricted_sumset(field(p), full, full, p - 1)) == p - 1
