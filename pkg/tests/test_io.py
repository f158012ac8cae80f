import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from corewidth.corpus import CORES, LANGUAGES, load_core, load_language
from corewidth.io import (
    LoadError,
    core_from_json,
    core_to_json,
    instance_from_json,
    instance_to_json,
    language_from_json,
    language_to_json,
    read_json,
    relation_from_json,
    relation_to_json,
    trace_to_jsonl,
)
from corewidth.minimality import establish_minimality

from helpers import random_instance, random_relation


@pytest.mark.parametrize("name", sorted(CORES))
def test_core_round_trip(name):
    core = load_core(name)
    doc = json.loads(json.dumps(core_to_json(core)))
    back = core_from_json(doc)
    assert back.signature.orbitals == core.signature.orbitals
    assert len(back.bounds) == len(core.bounds)
    assert core_to_json(back) == core_to_json(core)


@pytest.mark.parametrize("name", sorted(LANGUAGES))
def test_language_round_trip(name):
    core, lang = load_language(name)
    back = language_from_json(json.loads(json.dumps(language_to_json(lang, core.name))), core)
    assert back == lang


@given(st.integers(0, 10**6), st.sampled_from(["random_graph", "liberal_digraph", "equality"]),
       st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_relation_round_trip(seed, name, k):
    core = load_core(name)
    R = random_relation(core, k, random.Random(seed), nonempty=False)
    assert relation_from_json(json.loads(json.dumps(relation_to_json(R))), core) == R


def test_instance_round_trip_and_trace():
    core, lang = load_language("graph_clauses")
    inst = random_instance(lang, random.Random(3), 5, 4, min_vars=3)
    inline = instance_from_json(instance_to_json(inst), core, {})
    named = instance_from_json(instance_to_json(inst, list(inst.names)), core, lang)
    for back in (inline, named):
        assert back.variables == inst.variables
        assert [(c.scope, c.relation) for c in back.constraints] == \
               [(c.scope, c.relation) for c in inst.constraints]
    m = establish_minimality(inst, 3, core=core)
    lines = trace_to_jsonl(m.trace, core).splitlines()
    assert len(lines) == len(m.trace)
    assert all({"step", "constraint", "removed_orbit", "because"} <= set(json.loads(x)) for x in lines)


def _err(fn, *args, match):
    with pytest.raises(LoadError, match=match):
        fn(*args)


def test_core_errors():
    ok = core_to_json(load_core("random_graph"))
    _err(core_from_json, {}, match="missing field 'orbitals'")
    _err(core_from_json, {"orbitals": [{"name": "E"}, {"name": "E"}]}, match="unique")
    _err(core_from_json, {"orbitals": [{"name": "A", "inverse": "B"}]}, match="unknown inverse")
    bad = json.loads(json.dumps(ok))
    bad["bounds"] = [{"size": 3, "labels": [[0, 1, "Q"]]}]
    _err(core_from_json, bad, match="unknown orbital 'Q'")
    bad["bounds"] = [{"size": 3, "labels": [[0, 0, "E"]]}]
    _err(core_from_json, bad, match="bad points")
    bad["bounds"] = [{"size": 2, "labels": [[0, 1, "E"]]}]
    _err(core_from_json, bad, match="size")


def test_relation_and_instance_errors():
    core, lang = load_language("graph_clauses")
    _err(relation_from_json, {"formula": "E(1,2)"}, core, match="missing field 'arity'")
    _err(relation_from_json, {"arity": 2, "formula": "Q(1,2)"}, core, match="relation")
    _err(relation_from_json, {"arity": 2, "orbits": [{"partition": [0, 1], "labels": {"0,1": "Q"}}]},
         core, match="unknown orbital")
    _err(language_from_json, {"relations": [{"name": "a", "arity": 2, "formula": "E(1,2)"}] * 2},
         core, match="duplicate")
    doc = {"variables": ["x", "y"], "constraints": [{"scope": ["x", "y"], "relation": "nope"}]}
    _err(instance_from_json, doc, core, lang, match="undeclared relation 'nope'")
    doc["constraints"][0]["relation"] = "neq_or_E"
    _err(instance_from_json, doc, core, lang, match="arity 3 but scope has 2")
    doc = {"variables": ["x"], "constraints": [{"scope": ["x", "y"], "relation": "E"}]}
    _err(instance_from_json, doc, core, lang, match="undeclared variables")


def test_read_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\n  oops")
    _err(read_json, p, match="bad.json:2")
    _err(read_json, tmp_path / "missing.json", match="missing.json")
