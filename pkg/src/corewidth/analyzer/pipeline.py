"""From a cyclic implication graph to a certificate, and language-level search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from ..core import BinaryCore, is_liberal, max_bound
from ..impgraph import ArcWitness, build_graph, cycle_arcs, find_cycle
from ..minimality import Constraint, Instance
from ..relalg.implications import (
    Arrow,
    CompositionError,
    ImplicationDesc,
    first_pair,
    flip_to_fwd_bwd,
    is_implication,
    reinterpret_bwd_fwd,
    second_pair,
)
from ..relalg.relation import Relation, project
from ..solver import minimize_and_merge
from .bipartite import CompletionError, compose, make_complete
from .critical import CriticalWitness, synthesize_critical
from .patterns import detect_patterns
from .trace import Construction

SIMPLE = "implicationally simple up to bound"
NO_BSW = "no bounded strict width"
HARD_ONLY = "implicationally hard (no strict-width conclusion)"
EXHAUSTED = "search budget exhausted"

# returns the relation on the witness variables and its trace name
ArcSource = Callable[[ArcWitness], tuple[Relation, str]]


def _constraint_source(inst: Instance, build: Construction, names: list[str]) -> ArcSource:
    def source(w: ArcWitness):
        c = inst.constraints[w.constraint]
        pos = [c.scope.index(v) for v in w.variables]
        n = build.join([(names[w.constraint], tuple(range(len(c.scope))))], tuple(pos), "arc")
        return project(c.relation, pos), n
    return source


def cycle_to_implication(inst: Instance, cycle: list, arcs: Optional[list] = None,
                         build: Optional[Construction] = None,
                         source: Optional[ArcSource] = None) -> tuple[ImplicationDesc, str]:
    """Compose the implications along ``cycle`` into one (→, ←)-implication.

    Without ``source`` each arc reads its constraint's relation, projected to
    the witness variables; trace names are ``c0, c1, ...``.
    """
    if arcs is None:
        raise ValueError("arc witnesses are required")
    if build is None:
        core = inst.constraints[0].relation.core
        names = [f"c{i}" for i in range(len(inst.constraints))]
        build = Construction(core, {n: c.relation for n, c in zip(names, inst.constraints)})
    if source is None:
        source = _constraint_source(inst, build, [f"c{i}" for i in range(len(inst.constraints))])
    descs = []
    for (u, w), arc in zip(zip(cycle, cycle[1:]), arcs):
        R, name = source(arc)
        if build.get(name) != R:
            raise CompositionError("arc source disagrees with its trace")
        ij, kl = first_pair(R.arity, arc.L), second_pair(R.arity, arc.P)
        C, D = project(R, ij), project(R, kl)
        C1 = Relation.binary(R.core, u.labels & C.codes)
        D1 = Relation.binary(R.core, w.labels & D.codes)
        if not is_implication(R, C, D, C1, D1, arc.L, arc.P):
            raise CompositionError(f"arc {u.pair} -> {w.pair} is not an implication of its source")
        descs.append((ImplicationDesc(R, C, D, C1, D1, arc.L, arc.P), name))
    d, n = descs[0]
    for e, en in descs[1:]:
        d, n = compose(d, e, build, n, en)
    if d.arity == 3:
        if (d.L, d.P) == (Arrow.BWD, Arrow.FWD):
            return reinterpret_bwd_fwd(d), n
        if d.L is d.P:
            d, n = compose(d, d, build, n, n)
    if d.arity == 4:
        d, perm = flip_to_fwd_bwd(d)
        if perm != (0, 1, 2, 3):
            n2 = build.apply("perm:" + ",".join(map(str, perm)), [n], "flip")
            assert build.env[n2] == d.relation
            n = n2
    return d, n


# ---------------------------------------------------------------------------
# language search
# ---------------------------------------------------------------------------

@dataclass
class Report:
    verdict: str
    evidence: dict = field(default_factory=dict)
    search_coverage: dict = field(default_factory=dict)
    witness: Optional[CriticalWitness] = None

    def to_json(self) -> dict:
        from ..io import FORMAT_VERSION
        return {"format_version": FORMAT_VERSION, "verdict": self.verdict,
                "evidence": self.evidence, "search_coverage": self.search_coverage}


def _canonical(cons: list[tuple[str, tuple]], n: int) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((name, tuple(perm[v] for v in sc)) for name, sc in cons))
        if best is None or key < best:
            best = key
    return best


def generate_instances(language: Mapping[str, Relation], max_vars: int,
                       max_constraints: int) -> list[tuple]:
    """Canonical instances as sorted ``((name, scope), ...)`` tuples.

    Single constraints use distinct variables; with two or more constraints
    each new constraint may share variables with earlier ones.
    """
    names = sorted(language)
    seen = set()
    out = []

    def add(cons, n):
        key = _canonical(cons, n)
        if key not in seen:
            seen.add(key)
            out.append(key)

    frontier = []
    for name in names:
        k = language[name].arity
        if k <= max_vars:
            cons = [(name, tuple(range(k)))]
            add(cons, k)
            frontier.append((cons, k))
    for _ in range(max_constraints - 1):
        nxt = []
        for cons, n in frontier:
            for name in names:
                k = language[name].arity
                # each slot takes an existing variable or the next fresh one
                for scope in _scopes(k, n, max_vars):
                    m = max([n - 1] + list(scope)) + 1
                    new = cons + [(name, scope)]
                    before = len(seen)
                    add(new, m)
                    if len(seen) > before:
                        nxt.append((new, m))
        frontier = nxt
    out.sort(key=lambda c: (len(c), max(v for _, sc in c for v in sc), c))
    return out


def _scopes(k: int, n: int, cap: int):
    def rec(prefix, fresh):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(fresh + 1):
            if v in prefix or v >= cap:
                continue
            yield from rec(prefix + [v], max(fresh, v + 1) if v == fresh else fresh)
    yield from rec([], n)


def _to_instance(key: tuple, language: Mapping[str, Relation]) -> Instance:
    nv = max(v for _, sc in key for v in sc) + 1
    variables = tuple(f"v{i}" for i in range(nv))
    cons = tuple(Constraint(tuple(variables[v] for v in sc), language[name]) for name, sc in key)
    return Instance(variables, cons, tuple(name for name, _ in key))


def _join_source(original: Instance, rep: dict, build: Construction) -> ArcSource:
    """Arc relations as projections of the whole (identified) instance."""
    atoms = [(name, tuple(rep[v] for v in c.scope))
             for name, c in zip(original.names, original.constraints)]

    def source(w: ArcWitness):
        n = build.join(atoms, tuple(w.variables), "arc")
        return build.get(n), n
    return source


def certify_cycle(original: Instance, rep: dict, cur: Instance, cycle: list, arcs: list,
                  language: Mapping[str, Relation], core: BinaryCore) -> tuple[Optional[CriticalWitness], list]:
    build = Construction(core, language)
    diags = []
    try:
        d, n = cycle_to_implication(cur, cycle, arcs, build, _join_source(original, rep, build))
    except (CompositionError, ValueError) as e:
        return None, [f"cycle composition: {e}"]
    try:
        comp = make_complete(d, d, build, (n, n))
    except (CompletionError, CompositionError) as e:
        return None, [f"completion: {e}"]
    syn = synthesize_critical(comp.desc, build, comp.name)
    diags.extend(syn.diagnostics)
    if syn.witness is not None:
        problems = syn.witness.verify(language)
        if problems:
            return None, diags + problems
    return syn.witness, diags


def analyze_language(language: Mapping[str, Relation], core: BinaryCore, max_vars: int = 4,
                     max_constraints: int = 2, budget: Optional[int] = None) -> Report:
    """Search bounded instance families for a cyclic implication graph."""
    for name, R in language.items():
        if R.core != core:
            raise ValueError(f"relation {name!r} is over a different core")
    liberal = is_liberal(core)
    keys = generate_instances(language, max_vars, max_constraints)
    cov = {"max_vars": max_vars, "max_constraints": max_constraints,
           "instances_generated": len(keys), "instances_analyzed": 0, "trivial": 0,
           "cyclic": 0, "budget": budget, "budget_exhausted": False}
    evidence: dict = {"liberal_core": liberal, "max_bound": max_bound(core)}
    patterns = []
    if liberal:
        for name in sorted(language):
            for f in detect_patterns(language[name], name):
                patterns.append((name, f))
    evidence["patterns"] = [{"relation": n, **f.to_json()} for n, f in patterns]
    first_cycle = None
    witness = None
    diags = []
    for key in keys:
        if budget is not None and cov["instances_analyzed"] >= budget:
            cov["budget_exhausted"] = True
            break
        cov["instances_analyzed"] += 1
        inst = _to_instance(key, language)
        mm = minimize_and_merge(inst, core)
        if mm is None:
            cov["trivial"] += 1
            continue
        cur, rep = mm
        g = build_graph(cur)
        cyc = find_cycle(g)
        if cyc is None:
            continue
        cov["cyclic"] += 1
        arcs = cycle_arcs(g, cyc)
        if first_cycle is None:
            first_cycle = {"instance": [[n, list(sc)] for n, sc in key],
                           "cycle": [{"pair": list(v.pair),
                                      "C": sorted(core.signature.name(c) for c in v.labels)}
                                     for v in cyc]}
        if liberal and witness is None:
            witness, d = certify_cycle(inst, rep, cur, cyc, arcs, language, core)
            diags.extend(d)
            if witness is not None:
                evidence["certified_instance"] = [[n, list(sc)] for n, sc in key]
                break
    if first_cycle is not None:
        evidence["cycle"] = first_cycle
    if diags:
        evidence["diagnostics"] = diags
    if witness is None and patterns:
        witness = patterns[0][1].witness
        evidence["witness_source"] = "pattern"
    if witness is not None:
        evidence.setdefault("witness_source", "cycle")
        evidence["witness"] = witness.to_json()
        return Report(NO_BSW, evidence, cov, witness)
    if first_cycle is not None:
        return Report(HARD_ONLY, evidence, cov)
    if cov["budget_exhausted"]:
        return Report(EXHAUSTED, evidence, cov)
    evidence["note"] = ("relational width (2, MaxBound) is conditional on simplicity of "
                        "every instance, not only those searched")
    return Report(SIMPLE, evidence, cov)
