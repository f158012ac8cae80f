import random

import pytest
from hypothesis import given, settings, strategies as st

from corewidth.analyzer import generate_instances
from corewidth.analyzer.pipeline import _to_instance
from corewidth.core import max_bound
from corewidth.corpus import load_language
from corewidth.impgraph import (
    GraphError,
    NarrowingError,
    build_graph,
    cycle_arcs,
    find_cycle,
    find_sink_singleton,
    graph_to_dot,
    graph_to_json,
    narrow,
)
from corewidth.minimality import Constraint, Instance, establish_minimality
from corewidth.relalg import Relation, efficiently_entails, first_pair, from_formula, project, second_pair
from corewidth.solver import minimize_and_merge

from helpers import random_instance
from oracles import solutions, sub_labels


def alternating(name="two_cliques"):
    core, lang = load_language(name)
    inst = Instance(("x1", "x2", "x3"), (Constraint(("x1", "x2", "x3"), lang["R"]),))
    return core, establish_minimality(inst, max_bound(core), core=core).instance


def test_alternating_is_cyclic():
    core, inst = alternating()
    g = build_graph(inst, check=True)
    cyc = find_cycle(g)
    E = core.signature.code("E")
    assert cyc is not None and cyc[0] == cyc[-1]
    assert any(v.pair == ("x1", "x2") and v.labels == {E} for v in cyc)


def test_cycle_survives_singleton_vertices():
    core, inst = alternating()
    g = build_graph(inst)
    keep = {v for v in g.vertices if len(v.labels) == 1}
    g.vertices = [v for v in g.vertices if v in keep]
    g.arcs = {k: w for k, w in g.arcs.items() if k[0] in keep and k[1] in keep}
    assert find_cycle(g) is not None


def test_full_relations_give_no_arcs():
    core, lang = load_language("graph_clauses")
    v = ("a", "b", "c", "d")
    inst = Instance(v, (Constraint(v, Relation.full(core, 4)),))
    m = establish_minimality(inst, 3, core=core).instance
    g = build_graph(m, check=True)
    assert g.vertices and g.arcs == {} and find_cycle(g) is None


def test_neq_clause_instances_acyclic():
    core, lang = load_language("neq_clauses")
    seen = 0
    for key in generate_instances(lang, 4, 2):
        mm = minimize_and_merge(_to_instance(key, lang), core)
        if mm is None:
            continue
        assert find_cycle(build_graph(mm[0])) is None
        seen += 1
    assert seen > 50


def test_equality_rejected():
    core, lang = load_language("neq_clauses")
    v = ("x", "y", "z")
    inst = Instance(v, (Constraint(("x", "y"), lang["eq"]), Constraint(v, lang["neq_or_neq"])))
    m = establish_minimality(inst, 3, core=core).instance
    with pytest.raises(GraphError, match="merge"):
        build_graph(m)
    with pytest.raises(GraphError):
        build_graph(Instance(v, (Constraint(("x", "y"), lang["eq"]),)), check=True)


def test_sinks():
    core, lang = load_language("neq_clauses")
    v = ("a", "b", "c", "d")
    inst = Instance(v, (Constraint(("a", "b", "c", "d"), lang["neq_or_neq4"]),))
    m = establish_minimality(inst, 3, core=core).instance
    g = build_graph(m)
    assert find_cycle(g) is None
    s = find_sink_singleton(g, m)
    assert s is not None and len(g.domains[s.pair]) >= 2
    core, lang = load_language("graph_clauses")
    single = establish_minimality(Instance(("x", "y", "z"), (
        Constraint(("x", "y"), lang["E"]), Constraint(("y", "z"), lang["N"]),
        Constraint(("x", "z"), lang["E"]))), 3, core=core).instance
    assert find_sink_singleton(build_graph(single), single) is None


def test_sink_preference():
    core, lang = load_language("graph_clauses")
    v = ("a", "b", "c")
    inst = establish_minimality(Instance(v, (Constraint(v, Relation.full(core, 3).select(0, 1, [1, 2])),
                                             Constraint(("b", "c"), lang["neq"]),
                                             Constraint(("a", "c"), lang["neq"]))), 3, core=core).instance
    g = build_graph(inst)
    assert len(find_sink_singleton(g, inst, "smallest").labels) == 1
    assert len(find_sink_singleton(g, inst, "largest").labels) == 1  # domains have two orbitals


def test_narrow_at_non_sink_breaks_minimality():
    core, lang = load_language("graph_clauses")
    T = from_formula(core, 3, "(E(1,2) & E(2,3)) | (N(1,2) & 2!=3 & 1!=3)")
    v = ("x", "y", "z")
    inst = establish_minimality(Instance(v, (Constraint(v, T), Constraint(("y", "z"), lang["neq"]))),
                                3, core=core).instance
    g = build_graph(inst)
    E = core.signature.code("E")
    src = next(a for a, _ in g.arcs if a.pair == ("x", "y") and a.labels == {E})
    with pytest.raises(NarrowingError):
        narrow(inst, src.pair, src.labels, check=True)
    sink = find_sink_singleton(g, inst)
    narrow(inst, sink.pair, sink.labels, check=True)


def test_json_and_dot():
    core, inst = alternating()
    g = build_graph(inst)
    doc = graph_to_json(g, core.signature)
    assert len(doc["vertices"]) == len(g.vertices) and len(doc["arcs"]) == len(g.arcs)
    assert doc["arcs"][0]["witness"]["L"] in ("->", "<-")
    dot = graph_to_dot(g, core.signature)
    assert dot.startswith("digraph") and dot.count("->") >= len(g.arcs)


LANGS = [load_language(n) for n in ("graph_clauses", "en_ne_liberal", "two_cliques")]


@given(st.integers(0, 10**6), st.sampled_from(range(3)))
@settings(max_examples=40, deadline=None)
def test_arcs_are_sound(seed, which):
    core, lang = LANGS[which]
    inst = random_instance(lang, random.Random(seed), 5, 3, min_vars=3)
    mm = minimize_and_merge(inst, core)
    if mm is None:
        return
    cur = mm[0]
    g = build_graph(cur)
    for (a, b), w in g.arcs.items():
        c = cur.constraints[w.constraint]
        R = project(c.relation, [c.scope.index(x) for x in w.variables])
        ij, kl = first_pair(R.arity, w.L), second_pair(R.arity, w.P)
        assert (w.variables[ij[0]], w.variables[ij[1]]) == a.pair
        assert (w.variables[kl[0]], w.variables[kl[1]]) == b.pair
        assert efficiently_entails(R, Relation.binary(core, a.labels), ij,
                                   Relation.binary(core, b.labels), kl)
    cyc = find_cycle(g)
    if cyc is not None:
        assert len(cycle_arcs(g, cyc)) == len(cyc) - 1


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_narrowing_keeps_solutions(seed):
    core, lang = LANGS[0]
    inst = random_instance(lang, random.Random(seed), 5, 4, min_vars=3)
    mm = minimize_and_merge(inst, core)
    if mm is None:
        return
    cur = mm[0]
    g = build_graph(cur)
    if find_cycle(g) is not None:
        return
    s = find_sink_singleton(g, cur)
    if s is None:
        return
    out = narrow(cur, s.pair, s.labels, check=True)
    n = len(cur.variables)
    i, j = cur.variables.index(s.pair[0]), cur.variables.index(s.pair[1])
    before = solutions(cur, core)
    want = {r for r in before if sub_labels(r, n, (i, j), core)[0] in s.labels}
    assert solutions(out, core) == want
    assert want  # a sink keeps a solution of this satisfiable language
