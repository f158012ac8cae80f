"""JSON documents for cores, relations, instances, orbits and certificates.

Every emitted document carries ``format_version``.  Loading raises
:class:`LoadError` with the offending location in the message.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from .core import BinaryCore, CoreSignature, FiniteStructure, validate_core
from .minimality import Constraint, Instance, TraceEntry
from .orbits import Orbit, canonicalize, pair_columns
from .relalg.relation import Relation, from_formula

FORMAT_VERSION = 1


class LoadError(ValueError):
    pass


def _need(doc: Mapping, key: str, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise LoadError(f"{where}: missing field {key!r}")
    return doc[key]


def read_json(path) -> Any:
    p = Path(path)
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise LoadError(f"{p}:{e.lineno}:{e.colno}: {e.msg}") from None
    except OSError as e:
        raise LoadError(f"{p}: {e.strerror}") from None


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# cores ---------------------------------------------------------------------

def core_to_json(core: BinaryCore) -> dict:
    sig = core.signature
    bounds = []
    for b in core.bounds:
        labels = [[i, j, sig.name(b.label(i, j))] for i, j in pair_columns(b.n)]
        bounds.append({"size": b.n, "labels": labels})
    return {
        "format_version": FORMAT_VERSION,
        "name": core.name,
        "orbitals": [{"name": o.name, "inverse": sig.name(sig.inv(o.code))} for o in sig.orbitals],
        "bounds": bounds,
    }


def core_from_json(doc: Mapping, where: str = "core", validate: bool = True) -> BinaryCore:
    orbs = _need(doc, "orbitals", where)
    names = []
    inverse = {}
    for n, o in enumerate(orbs):
        name = _need(o, "name", f"{where}.orbitals[{n}]")
        names.append(name)
        inverse[name] = o.get("inverse", name)
    if len(set(names)) != len(names):
        raise LoadError(f"{where}: orbital names must be unique")
    for n, name in enumerate(names):
        if inverse[name] not in inverse:
            raise LoadError(f"{where}.orbitals[{n}]: unknown inverse {inverse[name]!r}")
    sig = CoreSignature.from_names(names, inverse)
    bounds = []
    for bi, b in enumerate(doc.get("bounds", [])):
        loc = f"{where}.bounds[{bi}]"
        n = _need(b, "size", loc)
        m = np.zeros((n, n), np.int64)
        given = set()
        for li, entry in enumerate(_need(b, "labels", loc)):
            try:
                i, j, lab = entry
                c = sig.code(lab)
            except (ValueError, TypeError):
                raise LoadError(f"{loc}.labels[{li}]: expected [i, j, orbital]") from None
            except KeyError:
                raise LoadError(f"{loc}.labels[{li}]: unknown orbital {lab!r}") from None
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise LoadError(f"{loc}.labels[{li}]: bad points ({i}, {j})")
            # an explicit reversed entry is kept as given so validation can flag it
            m[i, j] = c
            given.add((i, j))
            if (j, i) not in given:
                m[j, i] = sig.inv(c)
        bounds.append(FiniteStructure.from_matrix(m))
    core = BinaryCore(sig, tuple(bounds), doc.get("name", "core"))
    if validate:
        diags = validate_core(core)
        if diags:
            raise LoadError(f"{where}: " + "; ".join(str(d) for d in diags))
    return core


# orbits and relations ------------------------------------------------------

def orbit_to_json(o: Orbit, core: BinaryCore) -> dict:
    sig = core.signature
    return {"partition": list(o.partition),
            "labels": {f"{a},{b}": sig.name(c) for (a, b), c in sorted(o.block_labels.items())}}


def orbit_from_json(doc: Mapping, arity: int, core: BinaryCore, where: str = "orbit") -> Orbit:
    part = _need(doc, "partition", where)
    labs = {}
    for key, name in doc.get("labels", {}).items():
        try:
            a, b = (int(x) for x in key.split(","))
            labs[(a, b)] = core.signature.code(name)
        except KeyError:
            raise LoadError(f"{where}: unknown orbital {name!r}") from None
        except ValueError:
            raise LoadError(f"{where}: bad block pair {key!r}") from None
    try:
        return canonicalize(arity, part, labs, core.signature)
    except ValueError as e:
        raise LoadError(f"{where}: {e}") from None


def relation_to_json(R: Relation, name: str = "") -> dict:
    return {"format_version": FORMAT_VERSION, "name": name, "arity": R.arity,
            "orbits": [orbit_to_json(o, R.core) for o in R.orbits]}


def relation_from_json(doc: Mapping, core: BinaryCore, where: str = "relation") -> Relation:
    arity = _need(doc, "arity", where)
    if "formula" in doc:
        try:
            return from_formula(core, arity, doc["formula"])
        except ValueError as e:
            raise LoadError(f"{where}: {e}") from None
    orbs = [orbit_from_json(o, arity, core, f"{where}.orbits[{i}]")
            for i, o in enumerate(_need(doc, "orbits", where))]
    return Relation.from_orbits(core, arity, orbs)


def language_from_json(doc: Mapping, core: BinaryCore, where: str = "language") -> dict[str, Relation]:
    out = {}
    for i, r in enumerate(_need(doc, "relations", where)):
        name = _need(r, "name", f"{where}.relations[{i}]")
        if name in out:
            raise LoadError(f"{where}.relations[{i}]: duplicate name {name!r}")
        out[name] = relation_from_json(r, core, f"{where}.relations[{i}]")
    return out


def language_to_json(lang: Mapping[str, Relation], core_name: str = "") -> dict:
    return {"format_version": FORMAT_VERSION, "core": core_name,
            "relations": [relation_to_json(R, n) for n, R in lang.items()]}


# instances -----------------------------------------------------------------

def instance_to_json(inst: Instance, names: Optional[list[str]] = None) -> dict:
    """Relations are inlined unless ``names`` gives a language name per constraint."""
    cons = []
    for i, c in enumerate(inst.constraints):
        if names is not None:
            rel = names[i]
        else:
            rel = relation_to_json(c.relation)
            del rel["format_version"], rel["name"]
        cons.append({"scope": list(c.scope), "relation": rel})
    return {"format_version": FORMAT_VERSION, "variables": list(inst.variables), "constraints": cons}


def instance_from_json(doc: Mapping, core: BinaryCore, language: Mapping[str, Relation],
                       where: str = "instance") -> Instance:
    variables = tuple(_need(doc, "variables", where))
    cons = []
    names = []
    for i, c in enumerate(_need(doc, "constraints", where)):
        loc = f"{where}.constraints[{i}]"
        scope = tuple(_need(c, "scope", loc))
        rel = _need(c, "relation", loc)
        if isinstance(rel, str):
            if rel not in language:
                raise LoadError(f"{loc}: undeclared relation {rel!r}")
            R = language[rel]
            names.append(rel)
        else:
            R = relation_from_json(rel, core, f"{loc}.relation")
            names.append(f"inline{i}")
        if R.arity != len(scope):
            raise LoadError(f"{loc}: relation arity {R.arity} but scope has {len(scope)} variables")
        try:
            cons.append(Constraint(scope, R))
        except ValueError as e:
            raise LoadError(f"{loc}: {e}") from None
    try:
        return Instance(variables, tuple(cons), tuple(names))
    except ValueError as e:
        raise LoadError(f"{where}: {e}") from None


def trace_to_jsonl(trace: list[TraceEntry], core: BinaryCore) -> str:
    lines = []
    for t in trace:
        lines.append(json.dumps({"step": t.step, "constraint": t.constraint,
                                 "removed_orbit": orbit_to_json(t.removed_orbit, core),
                                 "because": t.because}, sort_keys=True, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)
