import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from corewidth.core import max_bound
from corewidth.corpus import load_core, load_language
from corewidth.minimality import (
    Constraint,
    Instance,
    establish_minimality,
    pair_domain,
    replay_trace,
    verify_minimality,
)
from corewidth.relalg import Relation
from corewidth.solver import brute_force_solve

from helpers import random_instance
from oracles import rowset, solutions


def neq_triangle():
    core, lang = load_language("neq_clauses")
    v = ("x", "y", "z")
    cons = tuple(Constraint(p, lang["neq"]) for p in itertools.combinations(v, 2))
    return core, Instance(v, cons)


def test_neq_triangle():
    core, inst = neq_triangle()
    m = establish_minimality(inst, 3, core=core)
    assert not m.trivial and verify_minimality(m.instance, 2, 3)
    for x, y in itertools.permutations(inst.variables, 2):
        assert pair_domain(m.instance, x, y).codes == {1}


def test_henson_tournament_is_trivial():
    h = load_core("henson_p7")
    b = h.bounds[0]
    v = tuple(f"v{i}" for i in range(7))
    cons = tuple(Constraint((v[i], v[j]), Relation.binary(h, [b.label(i, j)]))
                 for i, j in itertools.combinations(range(7), 2))
    inst = Instance(v, cons)
    m = establish_minimality(inst, 7, core=h)
    assert m.trivial
    assert brute_force_solve(inst, h) is None
    # dropping one pair constraint makes it satisfiable again
    loose = Instance(v, cons[1:])
    assert not establish_minimality(loose, 7, core=h).trivial
    assert brute_force_solve(loose, h) is not None


def test_fixpoint_is_stable():
    core, inst = neq_triangle()
    m = establish_minimality(inst, 3, core=core)
    again = establish_minimality(m.instance, 3, core=core)
    assert again.trace == []
    assert [rowset(c.relation) for c in again.instance.constraints] == \
        [rowset(c.relation) for c in m.instance.constraints]


def test_alternating_pair_domain():
    core, lang = load_language("two_cliques")
    inst = Instance(("a", "b", "c"), (Constraint(("a", "b", "c"), lang["R"]),))
    m = establish_minimality(inst, 3, core=core)
    assert pair_domain(m.instance, "a", "b").codes == {core.signature.code("E"), core.signature.code("N")}
    with pytest.raises(ValueError):
        pair_domain(m.instance, "a", "a")


def test_verify_minimality_negatives():
    core, lang = load_language("graph_clauses")
    v = ("x", "y", "z")
    no_cover = Instance(v, (Constraint(("x", "y"), lang["E"]),))
    assert not verify_minimality(no_cover, 2, 3)
    disagree = Instance(v, (Constraint(v, Relation.full(core, 3)), Constraint(("x", "y"), lang["E"])))
    assert not verify_minimality(disagree, 2, 3)
    assert verify_minimality(establish_minimality(disagree, 3, core=core).instance, 2, 3)


def test_few_variables_padding():
    core, lang = load_language("graph_clauses")
    inst = Instance(("x", "y"), (Constraint(("x", "y"), lang["neq"]),))
    m = establish_minimality(inst, 3, core=core)
    assert verify_minimality(m.instance, 2, 3) and not m.trivial


def test_only_k2():
    core, inst = neq_triangle()
    with pytest.raises(NotImplementedError):
        establish_minimality(inst, 3, k=3, core=core)
    with pytest.raises(ValueError):
        establish_minimality(inst, 1, core=core)


LANGS = [load_language(n) for n in ("graph_clauses", "neq_clauses", "two_cliques")]


@given(st.integers(0, 10**6), st.sampled_from(range(len(LANGS))))
@settings(max_examples=60, deadline=None)
def test_equivalence_and_monotonicity(seed, which):
    core, lang = LANGS[which]
    inst = random_instance(lang, random.Random(seed), 5, 4)
    l = max_bound(core)
    m = establish_minimality(inst, l, core=core)
    before = solutions(inst, core)
    after = solutions(m.instance, core)
    assert before == after
    if m.trivial:
        assert not before
    else:
        assert verify_minimality(m.instance, 2, l)
    for c_out, c_pad in zip(m.instance.constraints, m.padded.constraints):
        assert rowset(c_out.relation) <= rowset(c_pad.relation)
    replayed = replay_trace(m.padded, m.trace)
    assert [rowset(c.relation) for c in replayed.constraints] == \
        [rowset(c.relation) for c in m.instance.constraints]


def test_instance_validation():
    core, lang = load_language("graph_clauses")
    with pytest.raises(ValueError):
        Instance(("x", "x"))
    with pytest.raises(ValueError):
        Instance(("x",), (Constraint(("x", "y"), lang["E"]),))
    with pytest.raises(ValueError):
        Constraint(("x", "x"), lang["E"])
    with pytest.raises(ValueError):
        Constraint(("x",), lang["E"])


def test_trace_records_reasons():
    core, lang = load_language("graph_clauses")
    v = ("x", "y", "z")
    inst = Instance(v, (Constraint(v, lang["neq_or_E"]), Constraint(("x", "y"), lang["E"])))
    m = establish_minimality(inst, 3, core=core)
    assert m.trace and all(t.step == i for i, t in enumerate(m.trace))
    assert all(isinstance(t.because, dict) for t in m.trace)
    assert pair_domain(m.instance, "x", "y").codes == {core.signature.code("E")}
