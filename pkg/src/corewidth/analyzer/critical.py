"""Critical ternary relations: the check, the certificate and its synthesis."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from ..core import EQ, BinaryCore, is_liberal
from ..relalg.implications import Arrow, ImplicationDesc
from ..relalg.relation import Relation, entails_implication, project
from .bipartite import analyze_bipartite, build_bipartite
from .trace import Construction, base_relation, replay, template_to_json


def _codes(X) -> frozenset:
    return X.codes if isinstance(X, Relation) else frozenset(X)


def _block(core: BinaryCore, a: frozenset, b: frozenset) -> Relation:
    """All ternary orbits with ``(x1,x2)`` in ``a`` and ``(x2,x3)`` in ``b``."""
    full = Relation.full(core, 3)
    mask = np.isin(full.column(0, 1), sorted(a)) & np.isin(full.column(1, 2), sorted(b))
    return Relation(core, 3, full.rows[mask])


def critical_failures(R: Relation, C1, C2, D1, D2) -> list[str]:
    """Every violated condition; empty means critical."""
    if R.arity != 3:
        return ["relation is not ternary"]
    c1, c2, d1, d2 = (_codes(x) for x in (C1, C2, D1, D2))
    out = []
    if not (c1 and c2 and d1 and d2):
        out.append("empty binary relation")
    p12, p23 = project(R, (0, 1)).codes, project(R, (1, 2)).codes
    if c1 & c2 or not (c1 | c2) <= p12:
        out.append("C1, C2 not disjoint parts of the first projection")
    if d1 & d2 or not (d1 | d2) <= p23:
        out.append("D1, D2 not disjoint parts of the second projection")
    if EQ in c1 or EQ in d1:
        out.append("C1 or D1 is not anti-reflexive")
    if not ((EQ not in c2 and EQ not in d2) or c2 == d2 == {EQ}):
        out.append("C2, D2 neither both anti-reflexive nor both equality")
    core = R.core
    bc1, bd1 = Relation.binary(core, c1), Relation.binary(core, d1)
    if not entails_implication(R, bc1, (0, 1), bd1, (1, 2)):
        out.append("C1(x1,x2) does not imply D1(x2,x3)")
    if not entails_implication(R, bd1, (1, 2), bc1, (0, 1)):
        out.append("D1(x2,x3) does not imply C1(x1,x2)")
    if not _block(core, c1, d1) <= R:
        out.append("missing orbits of C1 ∧ D1")
    if not _block(core, c2, d2) <= R:
        out.append("missing orbits of C2 ∧ D2")
    return out


def is_critical_ternary(R: Relation, C1, C2, D1, D2) -> bool:
    return not critical_failures(R, C1, C2, D1, D2)


@dataclass
class CriticalWitness:
    R: Relation
    C1: Relation
    C2: Relation
    D1: Relation
    D2: Relation
    trace: list  # TraceStep
    output: str
    definitions: dict = field(default_factory=dict)  # role -> trace name or None
    templates: dict = field(default_factory=dict)  # user template id -> PpTemplate

    def replay(self, language: Mapping[str, Relation]) -> dict[str, Relation]:
        return replay(self.trace, self.R.core, language, self.templates)

    def verify(self, language: Mapping[str, Relation]) -> list[str]:
        """Failures of the replay and of the critical conditions."""
        out = []
        try:
            env = self.replay(language)
        except (ValueError, KeyError) as e:
            return [f"replay failed: {e}"]
        if env.get(self.output, language.get(self.output)) != self.R:
            out.append("replayed relation differs")
        roles = {"C1": self.C1, "C2": self.C2, "D1": self.D1, "D2": self.D2}
        for role, name in self.definitions.items():
            if name is None:
                continue
            got = env.get(name)
            if got is None:
                got = base_relation(name, self.R.core, language)
            if got != roles[role]:
                out.append(f"definition of {role} replays to a different relation")
        out.extend(critical_failures(self.R, self.C1, self.C2, self.D1, self.D2))
        return out

    def to_json(self) -> dict:
        sig = self.R.core.signature

        def names(r):
            return sorted(sig.name(c) for c in r.codes)

        return {"relation": self.R.describe(), "output": self.output,
                "C1": names(self.C1), "C2": names(self.C2),
                "D1": names(self.D1), "D2": names(self.D2),
                "definitions": dict(self.definitions),
                "templates": [template_to_json(t) for _, t in sorted(self.templates.items())],
                "trace": [s.to_json() for s in self.trace]}


@dataclass
class Synthesis:
    witness: Optional[CriticalWitness]
    diagnostics: list


def neq_name(build: Construction) -> Optional[str]:
    """A trace name for ``≠``: the lone orbital, or two orbitals joined at a point."""
    core = build.core
    codes = core.signature.codes
    target = Relation.binary(core, codes)
    if len(codes) == 1:
        return build.orbital(codes[0])
    for a in codes:
        for b in codes:
            if a < b:
                n = build.apply("apex_neq", [build.orbital(a), build.orbital(b)], "neq")
                if build.env[n] == target:
                    return n
    return None


def define_binary(build: Construction, codes: frozenset, source: str) -> Optional[str]:
    """A trace name whose relation has exactly ``codes``; None if not found."""
    core = build.core
    if len(codes) == 1:
        return build.orbital(next(iter(codes)))
    for o in core.signature.codes:
        n = build.apply("pin_binary", [source, build.orbital(o)], "def")
        if build.env[n].codes == codes:
            return n
    return None


def _inverse(build: Construction, name: Optional[str], codes: frozenset) -> Optional[str]:
    if name is None:
        return None
    if len(codes) == 1:
        return build.orbital(build.core.signature.inv(next(iter(codes))))
    return build.apply("perm:1,0", [name], "inv")


def synthesize_critical(d: ImplicationDesc, build: Optional[Construction] = None,
                        name: str = "R") -> Synthesis:
    """Turn a complete (→, ←)-implication into a critical ternary relation."""
    core = d.relation.core
    diags = []
    if not is_liberal(core):
        return Synthesis(None, ["core is not liberal: the constructions need bound-free "
                                "six-point configurations"])
    if (d.L, d.P) != (Arrow.FWD, Arrow.BWD) or d.C != d.D or d.C1 != d.D1:
        return Synthesis(None, ["expects a (→, ←)-implication over one domain"])
    a = analyze_bipartite(build_bipartite(d, d))
    if not a.complete:
        return Synthesis(None, ["implication is not complete"])
    if build is None:
        build = Construction(core, {name: d.relation})
    c1 = d.C1.codes
    sinks = sorted((a.codes_of(i) for i in a.sinks if a.codes_of(i) <= c1), key=sorted)
    sources = sorted((a.codes_of(i) for i in a.sources if not a.codes_of(i) & c1), key=sorted)
    sources += sorted((a.codes_of(i) for i in a.sources if a.codes_of(i) & c1
                       and a.codes_of(i) not in sinks), key=sorted)
    if not sinks or not sources:
        return Synthesis(None, ["no sink component inside C1 or no source component"])
    cache = {"neq": None}
    for cs in sinks:
        for ds in sources:
            if cs & ds:
                continue
            w = _attempt(d, build, name, cs, ds, cache)
            if isinstance(w, CriticalWitness):
                return Synthesis(w, diags)
            diags.append(w)
    return Synthesis(None, diags)


def _attempt(d, build, name, cs, ds, cache):
    core = d.relation.core
    R, Rn = d.relation, name
    inv = core.signature.inv

    def mixed(x):
        return EQ in x and len(x) > 1

    if mixed(cs) or mixed(ds):
        if cache["neq"] is None:  # built once per synthesis
            cache["neq"] = neq_name(build)
        if cache["neq"] is None:
            return "disequality is not pp-definable from two orbitals"
        tid = "neq_restrict3" if R.arity == 3 else "neq_restrict4"
        Rn = build.apply(tid, [Rn, cache["neq"]], "nr")
        R = build.env[Rn]
        cs, ds = cs - {EQ}, ds - {EQ}
        if not cs or not ds:
            return "restriction emptied a component"
    if R.arity == 3:
        b = build.apply("bowtie3", [Rn, Rn], "bt")
        r1 = build.apply("bowtie3", [b, b], "bt")
    else:
        b = build.apply("bowtie4", [Rn, Rn], "bt")
        r1 = build.apply("bowtie_3", [b, b], "bt")
    r2 = build.apply("meet_rev3", [r1], "crit")
    R2 = build.env[r2]
    x, y = (cs, ds) if EQ not in cs else (ds, cs)
    xi = frozenset(inv(c) for c in x)
    yi = frozenset(inv(c) for c in y)
    roles = (x, y, xi, yi)
    failures = critical_failures(R2, *roles)
    if failures:
        sig = core.signature
        return (f"components {sorted(sig.name(c) for c in cs)} / "
                f"{sorted(sig.name(c) for c in ds)}: " + "; ".join(failures))
    xn = define_binary(build, x, r2)
    yn = define_binary(build, y, r2)
    defs = {"C1": xn, "C2": yn, "D1": _inverse(build, xn, x), "D2": _inverse(build, yn, y)}
    steps, used = build.parts([r2] + [n for n in defs.values() if n])
    rel = [Relation.binary(core, r) for r in roles]
    return CriticalWitness(R2, *rel, trace=steps, output=r2, definitions=defs, templates=used)

