import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from corewidth.core import FiniteStructure
from corewidth.corpus import load_core, load_language
from corewidth.minimality import Constraint, Instance
from corewidth.relalg import Relation
from corewidth.solver import (
    EXIT_CODES,
    ORACLE_CAP,
    Certificate,
    Status,
    brute_force_solve,
    solve,
    verify_certificate,
)

from helpers import random_instance
from oracles import solutions


def neq_triangle():
    core, lang = load_language("neq_clauses")
    v = ("x", "y", "z")
    cons = tuple(Constraint(p, lang["neq"]) for p in itertools.combinations(v, 2))
    return core, Instance(v, cons)


def test_neq_triangle_sat():
    core, inst = neq_triangle()
    res = solve(inst, core, oracle=True)
    assert res.status is Status.SAT and res.exit_code == 0
    assert sorted(res.certificate.classes) == [("x",), ("y",), ("z",)]
    assert verify_certificate(res.certificate, inst, core)
    assert res.notes == ["oracle agrees"]


def test_equalities_are_merged():
    core, lang = load_language("neq_clauses")
    v = ("x", "y", "z")
    inst = Instance(v, (Constraint(("x", "y"), lang["eq"]), Constraint(("y", "z"), lang["neq"])))
    res = solve(inst, core)
    assert res.status is Status.SAT
    assert sorted(map(sorted, res.certificate.classes)) == [["x", "y"], ["z"]]
    assert any(e["event"] == "merge" for e in res.events)


def test_henson_tournament_unsat():
    h = load_core("henson_p7")
    b = h.bounds[0]
    v = tuple(f"v{i}" for i in range(7))
    cons = tuple(Constraint((v[i], v[j]), Relation.binary(h, [b.label(i, j)]))
                 for i, j in itertools.combinations(range(7), 2))
    res = solve(Instance(v, cons), h, oracle=True)
    assert res.status is Status.UNSAT and res.exit_code == 1
    assert res.notes == ["oracle agrees"]


def test_alternating_is_hard():
    core, lang = load_language("two_cliques")
    inst = Instance(("x", "y", "z"), (Constraint(("x", "y", "z"), lang["R"]),))
    res = solve(inst, core, oracle=True)
    assert res.status is Status.IMPLICATIONALLY_HARD and res.exit_code == 2
    assert res.cycle[0] == res.cycle[-1] and len(res.cycle_witnesses) == len(res.cycle) - 1
    assert res.notes == ["oracle: satisfiable"]
    assert verify_certificate(res.certificate, inst, core)


def test_exit_codes():
    assert EXIT_CODES == {Status.SAT: 0, Status.UNSAT: 1, Status.IMPLICATIONALLY_HARD: 2}


def test_oracle_edges():
    core, lang = load_language("neq_clauses")
    v = tuple(f"x{i}" for i in range(ORACLE_CAP + 1))
    with pytest.raises(ValueError, match="oracle cap"):
        brute_force_solve(Instance(v, ()), core)
    cert = brute_force_solve(Instance(("x",), ()), core)
    assert cert.classes == (("x",),)
    res = solve(Instance(v, (Constraint(("x0", "x1"), lang["neq"]),)), core, oracle=True)
    assert res.notes == [f"oracle skipped: more than {ORACLE_CAP} variables"]
    with pytest.raises(ValueError, match="different core"):
        solve(Instance(("x", "y"), (Constraint(("x", "y"), Relation.full(load_core("random_graph"), 2)),)), core)


def test_certificate_negatives():
    core, lang = load_language("graph_clauses")
    E, N = core.signature.code("E"), core.signature.code("N")
    v = ("x", "y", "z")
    inst = Instance(v, (Constraint(("x", "y"), lang["N"]),))
    clique = FiniteStructure.from_pairs(3, {(0, 1): E, (0, 2): E, (1, 2): E}, core.signature)
    assert not verify_certificate(Certificate((("x",), ("y",), ("z",)), clique), inst, core)
    ok = FiniteStructure.from_pairs(3, {(0, 1): N, (0, 2): E, (1, 2): E}, core.signature)
    assert verify_certificate(Certificate((("x",), ("y",), ("z",)), ok), inst, core)
    # wrong partition shapes
    assert not verify_certificate(Certificate((("x",), ("y",)), ok), inst, core)
    assert not verify_certificate(Certificate((("x", "y"), ("y",), ("z",)), ok), inst, core)
    # a labeling that contains a bound of the core
    h = load_core("henson_p7")
    b = h.bounds[0]
    hv = tuple(f"v{i}" for i in range(b.n))
    assert not verify_certificate(Certificate(tuple((x,) for x in hv), b), Instance(hv, ()), h)


LANGS = [load_language(n) for n in ("neq_clauses", "graph_clauses")]


@given(st.integers(0, 10**6), st.sampled_from(range(2)))
@settings(max_examples=60, deadline=None)
def test_solver_matches_oracle(seed, which):
    core, lang = LANGS[which]
    inst = random_instance(lang, random.Random(seed), 5, 4)
    res = solve(inst, core)
    want = bool(solutions(inst, core))
    assert res.status is (Status.SAT if want else Status.UNSAT)
    assert (brute_force_solve(inst, core) is not None) == want
    if want:
        assert verify_certificate(res.certificate, inst, core)
