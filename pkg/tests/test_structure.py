import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsumset.catalog import get_group
from rsumset.groups import build_cyclic, quotient, subgroup_generated
from rsumset.morphisms import enumerate_automorphisms, identity_automorphism, multiplication_automorphism
from rsumset.structure import (
    CONSISTENT,
    COUNTEREXAMPLE,
    HYPOTHESES_NOT_MET,
    classify_equality_case,
    classify_sigma_equality_case,
    coset_decompose,
    find_ap_decomposition,
    is_commutative_subset,
    is_sigma_commutative,
    progression,
)

from . import oracles


def _is_progression_witness(g, a, start, d):
    return (
        oracles.op(g, start, d) == oracles.op(g, d, start)
        and sorted(progression(g, start, d, len(a))) == sorted(a)
    )


# -- coset decomposition -------------------------------------------------


def test_coset_examples():
    z9 = build_cyclic(9)
    q = quotient(z9, z9.subset([0, 3, 6]))
    dec = coset_decompose(z9.subset([1, 4, 2]), q)
    assert [(a, s.to_list()) for a, s in dec.parts] == [(1, [0, 3]), (2, [0])]
    inside = coset_decompose(z9.subset([3, 6]), q)
    assert [(a, s.to_list()) for a, s in inside.parts] == [(0, [3, 6])]
    assert coset_decompose(z9.subset([]), q).parts == ()


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["Z12", "Heis3", "D4", "Q8", "F21"]), st.sets(st.integers(0, 26), max_size=10))
def test_coset_round_trip(name, elems):
    g = get_group(name)
    h = g.center if len(g.center) > 1 else subgroup_generated(g, [3])
    q = quotient(g, h)
    a = g.subset({x % g.order for x in elems})
    dec = coset_decompose(a, q)
    assert dec.reassemble() == a
    assert sum(len(s) for _, s in dec.parts) == len(a)
    cosets = [q.projection[r] for r in dec.representatives]
    assert len(set(cosets)) == len(cosets)
    assert all(len(s) and s <= h for _, s in dec.parts)
    sizes = [len(s) for _, s in dec.parts]
    assert sizes == sorted(sizes, reverse=True)


# -- commutativity -------------------------------------------------------


def test_commutative_examples():
    z12 = get_group("Z12")
    assert is_commutative_subset(z12.subset(range(12)))
    h = get_group("Heis3")
    assert not is_commutative_subset(h.subset([9, 3]))
    assert is_commutative_subset(h.center)
    assert is_commutative_subset(h.subset([5]))


def test_sigma_commutative_examples():
    z7 = build_cyclic(7)
    s = multiplication_automorphism(z7, 2)
    assert not is_sigma_commutative(z7.subset([1, 2]), s)
    assert oracles.op(z7, s(1), 2) == 4 and oracles.op(z7, s(2), 1) == 5
    assert is_sigma_commutative(z7.subset([3]), s)


@pytest.mark.parametrize("name", ["Q8", "S3", "Heis3"])
def test_sigma_commutative_with_identity(name):
    g = get_group(name)
    ident = identity_automorphism(g)
    for a in itertools.combinations(range(g.order), 3):
        sub = g.subset(a)
        assert is_sigma_commutative(sub, ident) == is_commutative_subset(sub)


# -- progressions --------------------------------------------------------


def test_ap_examples():
    z7 = build_cyclic(7)
    a = [2, 4, 6, 1]
    found = find_ap_decomposition(z7.subset(a))
    assert found is not None and _is_progression_witness(z7, a, *found)
    # (2, 2) is a witness too; the least pair in (a, d) order wins
    assert _is_progression_witness(z7, a, 2, 2)
    assert found == min((s, d) for s in a for d in range(7) if _is_progression_witness(z7, a, s, d))
    assert find_ap_decomposition(z7.subset([5])) == (5, 0)
    assert find_ap_decomposition(z7.subset([0, 1, 3])) is None
    with pytest.raises(ValueError):
        find_ap_decomposition(z7.subset([]))


def test_ap_search_matches_brute_force():
    for name in ["Z7", "Z12", "S3", "Q8"]:
        g = get_group(name)
        for size in (2, 3, 4):
            for a in itertools.combinations(range(g.order), size):
                want = [(s, d) for s in a for d in range(g.order) if _is_progression_witness(g, a, s, d)]
                got = find_ap_decomposition(g.subset(a))
                assert got == (min(want) if want else None)


def test_pair_needs_commuting_step():
    # in S3 every 2-subset {x, y} is a progression only through d = -x + y,
    # which must commute with x; check the op refuses otherwise
    g = get_group("S3")
    for x, y in itertools.permutations(range(6), 2):
        d = oracles.op(g, oracles.neg(g, x), y)
        res = find_ap_decomposition(g.subset([x, y]))
        if res is None:
            assert oracles.op(g, x, d) != oracles.op(g, d, x)


# -- equality case classification ---------------------------------------


def test_classify_examples():
    z7 = build_cyclic(7)
    rep = classify_equality_case(z7.subset([0, 1, 2]))
    assert rep.restricted_size == 3 and rep.equality and rep.commutative
    assert rep.progression is not None and rep.verdict == CONSISTENT
    # three distinct pair sums: every 3-set of Z7 is an equality case; no progression is only noted
    small = classify_equality_case(z7.subset([0, 1, 3]))
    assert small.equality and small.progression is None and small.verdict == CONSISTENT
    assert small.notes
    assert len(oracles.restricted(z7, [0, 1, 2, 4], [0, 1, 2, 4])) == 6 != 2 * 4 - 3
    assert classify_equality_case(z7.subset([0, 1, 2, 4])).verdict == HYPOTHESES_NOT_MET
    z11 = build_cyclic(11)
    rep = classify_equality_case(z11.subset([0, 1, 2, 3, 4]))
    assert rep.restricted_size == 7 and rep.verdict == CONSISTENT
    assert set(oracles.restricted(z11, range(5), range(5))) == set(range(1, 8))
    d = rep.to_dict()
    assert d["verdict"] == CONSISTENT and d["progression"] == [0, 1]


def test_classify_never_flags_hypothesis_failures():
    # |A| too large for the size hypothesis in Z5: equality may hold but it is not a counterexample
    z5 = build_cyclic(5)
    for a in itertools.combinations(range(5), 4):
        assert classify_equality_case(z5.subset(a)).verdict != COUNTEREXAMPLE


def test_noncommutative_equality_sets_violate_size_hypothesis():
    # Heis3: the size hypothesis only admits |A| <= 2, where equality forces commuting pairs
    h = get_group("Heis3")
    for a in itertools.combinations(range(27), 2):
        rep = classify_equality_case(h.subset(a))
        assert rep.verdict in (CONSISTENT, HYPOTHESES_NOT_MET)
        if rep.size_hypothesis and rep.equality:
            assert rep.commutative


@pytest.mark.parametrize("name", ["Z11", "Z13"])
def test_large_equality_sets_are_progressions(name):
    g = get_group(name)
    p = g.order
    for size in range(5, (p + 2) // 2 + 1):
        for a in itertools.combinations(range(p), size):
            if a[0] != 0:
                continue  # translates behave identically
            if len(oracles.restricted(g, a, a)) == 2 * size - 3:
                rep = classify_equality_case(g.subset(a))
                assert rep.verdict == CONSISTENT and rep.progression is not None


def test_classify_sigma():
    z7 = build_cyclic(7)
    s = multiplication_automorphism(z7, 2)
    for a in itertools.combinations(range(7), 2):
        rep = classify_sigma_equality_case(z7.subset(a), s)
        assert rep.verdict != COUNTEREXAMPLE
    even = multiplication_automorphism(z7, -1)
    assert not classify_sigma_equality_case(z7.subset([1, 2]), even).size_hypothesis
    g = get_group("Heis3")
    auts = [x for x in enumerate_automorphisms(g) if x.order % 2 == 1][::20]
    for s in auts:
        for a in itertools.combinations(range(27), 2):
            assert classify_sigma_equality_case(g.subset(a), s).verdict != COUNTEREXAMPLE
