import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corewidth import EQ
from corewidth.corpus import load_core, load_language
from corewidth.relalg import (
    Relation,
    combine,
    complement,
    efficiently_entails,
    entails_implication,
    entails_no_equalities,
    from_formula,
    inverse_binary,
    nonempty_proper_subsets,
    permute,
    project,
)

from helpers import random_relation
from oracles import brute_orbits, rowset, sub_labels

RG = load_core("random_graph")
DIG = load_core("liberal_digraph")
TC = load_core("two_cliques")
ALTERNATING = "(E(1,2) & N(2,3)) | (N(1,2) & E(2,3))"


def codes(core, *names):
    return {core.signature.code(n) for n in names}


def test_alternating_relation_over_two_cliques():
    R = from_formula(TC, 3, ALTERNATING)
    assert len(R) == 2 and all(EQ not in r for r in rowset(R))
    assert project(R, (0, 2)).codes == codes(TC, "N")
    assert permute(R, (2, 1, 0)) == R
    assert entails_no_equalities(R)


def test_alternating_relation_over_random_graph():
    R = from_formula(RG, 3, ALTERNATING)
    assert len(R) == 4  # (1,3) is free once both pairs are distinct
    assert project(R, (0, 2)) == Relation.binary(RG, RG.signature.codes)


def test_formula_equalities_and_errors():
    assert from_formula(DIG, 2, "1=2") == Relation.binary(DIG, [EQ])
    assert from_formula(DIG, 2, "1!=2") == Relation.binary(DIG, DIG.signature.codes)
    with pytest.raises(ValueError):
        from_formula(RG, 2, "X(1,2)")
    with pytest.raises(ValueError):
        from_formula(RG, 2, "E(1,3)")


def test_clause_formula_matches_direct_filtering():
    R = from_formula(RG, 3, "1!=2 | E(2,3)")
    E = RG.signature.code("E")
    want = {r for r in brute_orbits(RG, 3)
            if sub_labels(r, 3, (0, 1), RG) != (EQ,) or sub_labels(r, 3, (1, 2), RG) == (E,)}
    assert rowset(R) == want
    _, lang = load_language("graph_clauses")
    assert lang["neq_or_E"] == R


def test_projection_examples():
    full = Relation.full(DIG, 3)
    assert project(full, (0, 1)) == Relation.full(DIG, 2)
    R = from_formula(DIG, 3, "A(1,2) | 2=3")
    assert project(R, (0, 1, 2)) == R
    with pytest.raises(ValueError):
        project(R, (0, 0))
    with pytest.raises(IndexError):
        project(R, (0, 5))


def test_inverse_and_symmetric_meet():
    A = Relation.binary(DIG, codes(DIG, "A"))
    assert inverse_binary(A) == Relation.binary(DIG, codes(DIG, "Ai"))
    N = Relation.binary(DIG, codes(DIG, "N"))
    assert combine(N, inverse_binary(N), "and") == N


def test_combine_errors():
    with pytest.raises(ValueError):
        combine(Relation.full(RG, 2), Relation.full(RG, 3), "and")
    with pytest.raises(ValueError):
        combine(Relation.full(RG, 2), Relation.full(DIG, 2), "or")
    with pytest.raises(ValueError):
        combine(Relation.full(RG, 2), Relation.full(RG, 2), "xor")


def test_entailment_examples():
    R = from_formula(RG, 3, ALTERNATING)
    E, N = (Relation.binary(RG, codes(RG, x)) for x in ("E", "N"))
    assert entails_implication(R, E, (0, 1), N, (1, 2))
    assert not entails_implication(Relation.full(RG, 3), E, (0, 1), N, (1, 2))
    assert entails_implication(Relation.full(RG, 3), E, (0, 1), Relation.full(RG, 2), (1, 2))
    assert efficiently_entails(R, E, (0, 1), N, (1, 2))
    neq = Relation.binary(RG, RG.signature.codes)
    assert not efficiently_entails(R, neq, (0, 1), N, (1, 2))
    exact = from_formula(RG, 3, "E(1,2) & N(2,3)")
    assert not efficiently_entails(exact, E, (0, 1), N, (1, 2))


def test_no_equalities():
    assert not entails_no_equalities(Relation.binary(RG, [EQ]))
    assert entails_no_equalities(Relation.full(RG, 2))
    assert not entails_no_equalities(Relation.empty(RG, 2))


def test_proper_subsets_order():
    assert nonempty_proper_subsets([3, 1, 2]) == [frozenset(s) for s in
                                                  ([1], [2], [3], [1, 2], [1, 3], [2, 3])]


rels4 = st.integers(0, 10**6).map(lambda s: random_relation(DIG, 4, __import__("random").Random(s), 0.1))


@given(rels4, st.permutations(range(4)), st.permutations(range(4)))
@settings(max_examples=60, deadline=None)
def test_permute_project_commute(R, perm, sub):
    m = 3
    idx = list(sub[:m])
    lhs = project(permute(R, perm), idx)
    inv = list(np.argsort(perm))
    rhs = project(R, [inv[i] for i in idx])
    assert lhs == rhs


@given(rels4, st.permutations(range(4)))
@settings(max_examples=60, deadline=None)
def test_permute_matches_tuple_level(R, perm):
    got = rowset(permute(R, perm))
    want = {sub_labels(r, 4, tuple(np.argsort(perm)), DIG) for r in rowset(R)}
    # R'(x) = R(x[perm]) so a tuple t of R shows up as t reindexed by the inverse
    assert got == want


@given(rels4, rels4)
@settings(max_examples=40, deadline=None)
def test_boolean_algebra(R1, R2):
    a, b = rowset(R1), rowset(R2)
    assert rowset(combine(R1, R2, "and")) == a & b
    assert rowset(combine(R1, R2, "or")) == a | b
    assert rowset(combine(R1, R2, "minus")) == a - b
    assert complement(complement(R1)) == R1
    assert (R1 <= combine(R1, R2, "or"))


@given(rels4, st.data())
@settings(max_examples=60, deadline=None)
def test_efficient_implies_plain(R, data):
    ij = data.draw(st.sampled_from(list(itertools.permutations(range(4), 2))))
    kl = data.draw(st.sampled_from(list(itertools.permutations(range(4), 2))))
    c1 = data.draw(st.sets(st.sampled_from([0, 1, 2, 3]), min_size=1))
    d1 = data.draw(st.sets(st.sampled_from([0, 1, 2, 3]), min_size=1))
    C1, D1 = Relation.binary(DIG, c1), Relation.binary(DIG, d1)
    if efficiently_entails(R, C1, ij, D1, kl):
        assert entails_implication(R, C1, ij, D1, kl)


def test_relation_describe_and_repr():
    R = from_formula(RG, 2, "E(1,2)")
    assert R.describe() == [{"1,2": "E"}]
    assert repr(R) == "Relation(2, {E})"
