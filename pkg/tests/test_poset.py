import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codesign.errors import CarrierTooLarge, CodesignError, ElementNotInPoset, NotMonotone
from codesign.generators import random_monotone_map, random_poset, small_posets
from codesign.poset import (
    BOOL,
    UNIT,
    Antichain,
    MonotoneMap,
    SetFamily,
    antichain,
    chain,
    generate_sigma_algebra,
    is_monotone,
    minimal_elements,
    poset_opposite,
    poset_product,
    powerset_family,
    rectangle_family,
    upper_sets,
)

from oracles import leq_of, minimal_oracle, sigma_oracle, upper_sets_oracle


def test_chain_and_antichain_shapes():
    c = chain(3)
    assert c.elements == ("0", "1", "2")
    assert c.leq("0", "2") and not c.leq("2", "0")
    a = antichain(["x", "y"])
    assert not a.comparable("x", "y")


def test_invalid_orders_rejected():
    with pytest.raises(CodesignError, match="antisymmetric"):
        from codesign.poset import FinitePoset

        FinitePoset(["a", "b"], [[1, 1], [1, 1]])
    with pytest.raises(CodesignError, match="reflexive"):
        from codesign.poset import FinitePoset

        FinitePoset(["a"], [[0]])


def test_from_pairs_takes_closure():
    from codesign.poset import FinitePoset

    P = FinitePoset.from_pairs("abc", [("a", "b"), ("b", "c")])
    assert P.leq("a", "c")
    with pytest.raises(CodesignError):
        FinitePoset.from_pairs("ab", [("a", "b"), ("b", "a")])
    with pytest.raises(ElementNotInPoset):
        FinitePoset.from_pairs("ab", [("a", "z")])


def test_product_counts_multiply():
    B2 = poset_product(BOOL, BOOL)
    assert len(B2) == 4
    assert len(B2.pairs()) == 9


def test_product_with_unit_is_isomorphic():
    P = chain(3)
    PU = poset_product(P, UNIT)
    assert [x for x, _ in PU.elements] == list(P.elements)
    assert np.array_equal(PU.leq_table, P.leq_table)


def test_product_order_matches_definition():
    P, Q = chain(2), antichain(["x", "y", "z"])
    PQ = poset_product(P, Q)
    for (a, b), (c, d) in itertools.product(PQ.elements, repeat=2):
        assert PQ.leq((a, b), (c, d)) == (P.leq(a, c) and Q.leq(b, d))


def test_opposite():
    c = chain(2)
    op = poset_opposite(c)
    assert op.leq("1", "0") and not op.leq("0", "1")
    a = antichain("xy")
    assert poset_opposite(a) == a
    for P in small_posets(3):
        assert poset_opposite(poset_opposite(P)) == P


def test_minimal_elements_basic():
    c = chain(3)
    assert minimal_elements(c, c.elements).members == {"0"}
    assert len(minimal_elements(c, [])) == 0


def test_minimal_elements_grid_against_oracle():
    rng = np.random.default_rng(5)
    G = poset_product(chain(4), chain(4))
    leq = leq_of(G)
    for _ in range(50):
        S = [x for x in G.elements if rng.random() < 0.4]
        got = minimal_elements(G, S)
        assert set(got.members) == minimal_oracle(leq, S)
        # every element of S dominates a member
        assert all(any(G.leq(m, s) for m in got.members) for s in S)
        assert minimal_elements(G, got.members) == got


def test_antichain_validates():
    with pytest.raises(CodesignError, match="comparable"):
        Antichain(chain(2), frozenset({"0", "1"}))


def test_is_monotone():
    P = chain(2)
    assert is_monotone(P, P, {"0": "0", "1": "1"})
    assert not is_monotone(P, P, {"0": "1", "1": "0"})
    with pytest.raises(NotMonotone):
        MonotoneMap(P, P, {"0": "1", "1": "0"})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_is_monotone_matches_pair_check(seed):
    rng = np.random.default_rng(seed)
    P, Q = random_poset(rng, 4), random_poset(rng, 4)
    g = {p: Q.elements[int(rng.integers(len(Q)))] for p in P.elements}
    expected = all(Q.leq(g[a], g[b]) for a in P.elements for b in P.elements if P.leq(a, b))
    assert is_monotone(P, Q, g) == expected


def test_random_monotone_map_is_monotone():
    rng = np.random.default_rng(1)
    for _ in range(20):
        P, Q = random_poset(rng, 4), random_poset(rng, 3)
        random_monotone_map(rng, P, Q)  # validated on construction


def test_upper_sets_small():
    c = chain(2)
    assert set(upper_sets(c).sets) == {frozenset(), frozenset({"1"}), frozenset({"0", "1"})}
    a = antichain("xy")
    assert len(upper_sets(a)) == 4
    grid = poset_product(chain(2), chain(2))
    assert len(upper_sets(grid)) == 6


@pytest.mark.parametrize("P", small_posets(4), ids=lambda P: f"n{len(P)}")
def test_upper_sets_against_oracle(P):
    assert set(upper_sets(P).sets) == upper_sets_oracle(P)


def test_sigma_algebra_small():
    c = chain(2)
    sig = generate_sigma_algebra(upper_sets(c))
    assert set(sig.sets) == set(powerset_family(c).sets)
    triv = SetFamily(c, (frozenset(), frozenset(c.elements)))
    assert set(generate_sigma_algebra(triv).sets) == {frozenset(), frozenset(c.elements)}
    assert sig.is_sigma_algebra()


def test_sigma_algebra_matches_oracle():
    for P in small_posets(3):
        ups = upper_sets(P)
        assert set(generate_sigma_algebra(ups).sets) == sigma_oracle(P.elements, ups.sets)


def test_enumeration_cap():
    with pytest.raises(CarrierTooLarge):
        upper_sets(chain(13))
    assert len(upper_sets(chain(13), cap=13)) == 14


def test_rectangles_generate_product_sigma():
    P, Q = chain(2), antichain("xy")
    PQ = poset_product(P, Q)
    rect = rectangle_family(upper_sets(P), upper_sets(Q))
    assert set(generate_sigma_algebra(rect).sets) == set(generate_sigma_algebra(upper_sets(PQ)).sets)
