"""Replayable pp-constructions: named relations built by template steps.

Base names are language relation names, ``orb:<orbital>`` for a single
orbital of the core and ``eq`` for equality.  Every other name is the
output of exactly one template application.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..core import EQ, BinaryCore
from ..relalg.ppjoin import PpTemplate, get_template, pp_apply, register_template
from ..relalg.relation import Relation


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class TraceStep:
    output: str
    template: str
    inputs: tuple

    def to_json(self) -> dict:
        return {"output": self.output, "template": self.template, "inputs": list(self.inputs)}


def base_relation(name: str, core: BinaryCore, language: Mapping[str, Relation]) -> Relation:
    if name in language:
        return language[name]
    if name == "eq":
        return Relation.binary(core, [EQ])
    if name.startswith("orb:"):
        try:
            return Relation.binary(core, [core.signature.code(name[4:])])
        except KeyError:
            raise TraceError(f"unknown orbital in base name {name!r}") from None
    raise TraceError(f"unknown base relation {name!r}")


def template_to_json(t: PpTemplate) -> dict:
    return {"id": t.tid, "points": t.n_points, "visible": list(t.visible),
            "atoms": [[s, list(p)] for s, p in t.atoms], "slot_arities": list(t.slot_arities)}


def template_from_json(doc: Mapping) -> PpTemplate:
    return PpTemplate(doc["id"], int(doc["points"]), tuple(doc["visible"]),
                      tuple((int(s), tuple(p)) for s, p in doc["atoms"]),
                      tuple(doc["slot_arities"]))


def _ensure(t: PpTemplate) -> None:
    try:
        known = get_template(t.tid)
    except KeyError:
        register_template(t)
        return
    if known != t:
        raise TraceError(f"template {t.tid!r} conflicts with a registered one")


def replay(steps: Sequence[TraceStep], core: BinaryCore, language: Mapping[str, Relation],
           templates: Optional[Mapping[str, PpTemplate]] = None) -> dict[str, Relation]:
    """Evaluate every step from scratch; returns all named relations."""
    for t in (templates or {}).values():
        _ensure(t)
    env: dict[str, Relation] = {}

    def get(n):
        if n not in env:
            env[n] = base_relation(n, core, language)
        return env[n]

    for s in steps:
        if s.output in env or s.output in language:
            raise TraceError(f"name {s.output!r} defined twice")
        env[s.output] = pp_apply(s.template, [get(n) for n in s.inputs])
    return env


class Construction:
    """Accumulates template steps while evaluating them."""

    def __init__(self, core: BinaryCore, language: Mapping[str, Relation]):
        self.core = core
        self.language = dict(language)
        self.env: dict[str, Relation] = {}
        self.steps: list[TraceStep] = []
        self.templates: dict[str, PpTemplate] = {}

    def get(self, name: str) -> Relation:
        if name not in self.env:
            self.env[name] = base_relation(name, self.core, self.language)
        return self.env[name]

    def apply(self, template: str, inputs: Sequence[str], hint: str = "r") -> str:
        rel = pp_apply(template, [self.get(n) for n in inputs])
        name = f"{hint}{len(self.steps)}"
        self.steps.append(TraceStep(name, template, tuple(inputs)))
        self.env[name] = rel
        return name

    def join(self, atoms: Sequence[tuple[str, tuple]], visible: Sequence, hint: str = "j") -> str:
        """Existential join of named relations over named points."""
        if len(atoms) == 1 and set(visible) <= set(atoms[0][1]):
            name, pts = atoms[0]
            idx = [list(pts).index(v) for v in visible]
            if idx == list(range(len(pts))):
                return name
            return self.apply(f"proj:{len(pts)}:" + ",".join(map(str, idx)), [name], hint)
        points = {}
        for v in list(visible) + [v for _, pts in atoms for v in pts]:
            points.setdefault(v, len(points))
        slots = []
        for name, _ in atoms:
            if name not in slots:
                slots.append(name)
        shape = {"points": len(points), "visible": [points[v] for v in visible],
                 "atoms": [[slots.index(n), [points[v] for v in pts]] for n, pts in atoms],
                 "arities": [self.get(n).arity for n in slots]}
        digest = hashlib.sha1(json.dumps(shape, sort_keys=True).encode()).hexdigest()[:12]
        t = PpTemplate(f"user:join:{digest}", shape["points"], tuple(shape["visible"]),
                       tuple((s, tuple(p)) for s, p in shape["atoms"]), tuple(shape["arities"]))
        _ensure(t)
        self.templates[t.tid] = t
        return self.apply(t.tid, slots, hint)

    def orbital(self, code: int) -> str:
        return "eq" if code == EQ else f"orb:{self.core.signature.name(code)}"

    def needed(self, target: str) -> list[TraceStep]:
        """The steps ``target`` depends on, in order."""
        by_out = {s.output: s for s in self.steps}
        keep, todo = set(), [target]
        while todo:
            n = todo.pop()
            if n in by_out and n not in keep:
                keep.add(n)
                todo.extend(by_out[n].inputs)
        return [s for s in self.steps if s.output in keep]

    def parts(self, targets: Sequence[str]) -> tuple[list[TraceStep], dict[str, PpTemplate]]:
        """Steps and user templates needed for all ``targets``."""
        keep = set()
        for t in targets:
            keep.update(s.output for s in self.needed(t))
        steps = [s for s in self.steps if s.output in keep]
        used = {s.template: self.templates[s.template] for s in steps if s.template in self.templates}
        return steps, used
