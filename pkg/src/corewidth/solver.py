"""Sink-narrowing decision procedure, brute-force oracle and certificates."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

from .core import EQ, BinaryCore, FiniteStructure, _structure_diagnostics, embeds_into_core, max_bound
from .impgraph import build_graph, cycle_arcs, find_cycle, find_sink_singleton, narrow
from .minimality import Constraint, Instance, establish_minimality
from .orbits import orbit_from_structure, pair_columns
from .relalg.relation import project

ORACLE_CAP = 8


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    IMPLICATIONALLY_HARD = "IMPLICATIONALLY_HARD"


EXIT_CODES = {Status.SAT: 0, Status.UNSAT: 1, Status.IMPLICATIONALLY_HARD: 2}


@dataclass(frozen=True)
class Certificate:
    """A partition of the variables plus a labeling of the classes."""

    classes: tuple[tuple, ...]
    labeling: FiniteStructure

    def class_of(self) -> dict:
        return {v: i for i, cl in enumerate(self.classes) for v in cl}


@dataclass
class SolveResult:
    status: Status
    certificate: Optional[Certificate] = None
    events: list = field(default_factory=list)
    removals: list = field(default_factory=list)  # one list of TraceEntry per minimization
    cycle: Optional[list] = None
    cycle_witnesses: Optional[list] = None
    instance: Optional[Instance] = None
    notes: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def verify_certificate(cert: Certificate, inst: Instance, core: Optional[BinaryCore] = None) -> bool:
    core = core or inst.core
    flat = [v for cl in cert.classes for v in cl]
    if sorted(map(repr, flat)) != sorted(map(repr, inst.variables)) or len(set(flat)) != len(flat):
        return False
    if any(not cl for cl in cert.classes) or cert.labeling.n != len(cert.classes):
        return False
    if core is None:
        return not inst.constraints
    if _structure_diagnostics(cert.labeling, core.signature, "labeling"):
        return False
    if not embeds_into_core(cert.labeling, core):
        return False
    where = cert.class_of()
    for c in inst.constraints:
        o = orbit_from_structure(cert.labeling, [where[v] for v in c.scope])
        if o not in c.relation:
            return False
    return True


def _check_core(inst: Instance, core: Optional[BinaryCore]) -> Optional[BinaryCore]:
    core = core or inst.core
    for i, c in enumerate(inst.constraints):
        if c.relation.core != core:
            raise ValueError(f"constraint {i} is over a different core")
    return core


def brute_force_solve(inst: Instance, core: Optional[BinaryCore] = None,
                      cap: int = ORACLE_CAP) -> Optional[Certificate]:
    """Exhaustive search over variable partitions and class labelings.

    Independent of the propagation machinery: plain Python backtracking that
    places variables in order, trying existing classes first and then a new
    class whose labels are chosen in code order.
    """
    core = _check_core(inst, core)
    n = len(inst.variables)
    if n > cap:
        raise ValueError(f"{n} variables exceed the oracle cap {cap}")
    if core is None:
        if inst.constraints:
            raise ValueError("a core is required")
        if n > 1:
            raise ValueError("a core is required to label more than one class")
        cert = Certificate(tuple((v,) for v in inst.variables), FiniteStructure(n, ((EQ,),) * n))
        return cert
    sig = core.signature
    idx = inst.index()
    allowed: dict[tuple[int, int], set] = {}
    finish: dict[int, list] = {i: [] for i in range(n)}
    for c in inst.constraints:
        sc = [idx[v] for v in c.scope]
        rows = {tuple(int(x) for x in r) for r in c.relation.rows}
        for col, (p, q) in enumerate(pair_columns(len(sc))):
            u, w = sc[p], sc[q]
            labs = {r[col] for r in rows}
            if u > w:
                u, w, labs = w, u, {sig.inv(x) for x in labs}
            allowed[(u, w)] = allowed.get((u, w), labs) & labs
        finish[max(sc)].append((sc, rows))

    cls = [-1] * n
    lab: list[list[int]] = []

    def vlabel(u, w):
        a, b = cls[u], cls[w]
        return EQ if a == b else lab[a][b]

    def pairs_ok(i, members=None):
        for u in range(i) if members is None else members:
            if (u, i) in allowed and vlabel(u, i) not in allowed[(u, i)]:
                return False
        return True

    def full_ok(i):
        for sc, rows in finish[i]:
            if tuple(vlabel(sc[p], sc[q]) for p, q in pair_columns(len(sc))) not in rows:
                return False
        return True

    def structure():
        return FiniteStructure(len(lab), tuple(tuple(r) for r in lab))

    result = []

    def place(i):
        if i == n:
            classes = tuple(tuple(inst.variables[v] for v in range(n) if cls[v] == a)
                            for a in range(len(lab)))
            cert = Certificate(classes, structure())
            if verify_certificate(cert, inst, core):
                result.append(cert)
                return True
            return False
        for a in range(len(lab)):
            cls[i] = a
            if pairs_ok(i) and full_ok(i) and place(i + 1):
                return True
        p = len(lab)
        for row in lab:
            row.append(EQ)
        lab.append([EQ] * (p + 1))
        cls[i] = p
        if label_new(p, 0, i):
            return True
        lab.pop()
        for row in lab:
            row.pop()
        cls[i] = -1
        return False

    def label_new(p, a, i):
        if a == p:
            return embeds_into_core(structure(), core) and full_ok(i) and place(i + 1)
        members = [u for u in range(i) if cls[u] == a]
        for c in sig.codes:
            lab[a][p], lab[p][a] = c, sig.inv(c)
            if pairs_ok(i, members) and label_new(p, a + 1, i):
                return True
        return False

    place(0)
    return result[0] if result else None


def _merge(inst: Instance, groups: dict, eq_pairs: list) -> tuple[Instance, dict]:
    """Identify variables joined by ``eq_pairs``; earliest variable represents."""
    order = inst.index()
    parent = {v: v for v in inst.variables}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x, y in eq_pairs:
        a, b = find(x), find(y)
        if a != b:
            if order[b] < order[a]:
                a, b = b, a
            parent[b] = a
    rep = {v: find(v) for v in inst.variables}
    cons = []
    for c in inst.constraints:
        pos, scope = [], []
        for i, v in enumerate(c.scope):
            if rep[v] not in scope:
                pos.append(i)
                scope.append(rep[v])
        cons.append(Constraint(tuple(scope), project(c.relation, pos)))
    new_groups: dict = {}
    for v in inst.variables:
        new_groups.setdefault(rep[v], []).extend(groups[v])
    variables = tuple(v for v in inst.variables if rep[v] == v)
    return Instance(variables, tuple(cons)), new_groups


def _domains(inst: Instance) -> dict:
    out = {}
    for c in inst.constraints:
        for i, j in itertools.permutations(range(len(c.scope)), 2):
            out.setdefault((c.scope[i], c.scope[j]), set(int(x) for x in c.relation.column(i, j)))
    return out


def minimize_and_merge(inst: Instance, core: BinaryCore):
    """Minimize and identify equal variables until stable; None if trivial."""
    groups = {v: [v] for v in inst.variables}
    cur = inst
    l = max_bound(core)
    while True:
        m = establish_minimality(cur, l, core=core)
        if m.trivial:
            return None
        cur = m.instance
        dom = _domains(cur)
        eq = sorted((p for p, d in dom.items() if d == {EQ}),
                    key=lambda p: (cur.index()[p[0]], cur.index()[p[1]]))
        if not eq:
            rep = {v: r for r, vs in groups.items() for v in vs}
            return cur, rep
        cur, groups = _merge(cur, groups, eq)


def solve(inst: Instance, core: Optional[BinaryCore] = None, oracle: bool = False,
          max_rounds: Optional[int] = None) -> SolveResult:
    """Minimize, narrow at sinks of the implication graph, read off a certificate."""
    core = _check_core(inst, core)
    res = SolveResult(Status.UNSAT)
    if core is None:
        cert = brute_force_solve(inst)
        res.status = Status.SAT
        res.certificate = cert
        return res
    l = max_bound(core)
    groups = {v: [v] for v in inst.variables}
    cur = inst
    rounds = 0
    while True:
        rounds += 1
        if max_rounds is not None and rounds > max_rounds:
            raise RuntimeError("round limit exceeded")
        m = establish_minimality(cur, l, core=core)
        res.removals.append(m.trace)
        res.events.append({"event": "minimize", "removed": len(m.trace)})
        if m.trivial:
            res.status = Status.UNSAT
            res.instance = m.instance
            break
        cur = m.instance
        dom = _domains(cur)
        eq = sorted(((x, y) for (x, y), d in dom.items() if d == {EQ}),
                    key=lambda p: (cur.index()[p[0]], cur.index()[p[1]]))
        if eq:
            res.events.append({"event": "merge", "pairs": [list(p) for p in eq]})
            cur, groups = _merge(cur, groups, eq)
            continue
        if all(len(d) == 1 for d in dom.values()):
            res.certificate = _certificate(cur, dom, groups, core, inst)
            res.status = Status.SAT
            break
        g = build_graph(cur)
        cyc = find_cycle(g)
        if cyc is not None:
            res.status = Status.IMPLICATIONALLY_HARD
            res.cycle = cyc
            res.cycle_witnesses = cycle_arcs(g, cyc)
            res.instance = cur
            break
        sink = find_sink_singleton(g, cur)
        assert sink is not None, "acyclic graph without a sink"
        res.events.append({"event": "narrow", "pair": list(sink.pair),
                           "C": sorted(core.signature.name(c) for c in sink.labels)})
        cur = narrow(cur, sink.pair, sink.labels)
    if oracle:
        _cross_check(res, inst, core)
    return res


def _certificate(cur: Instance, dom: dict, groups: dict, core: BinaryCore,
                 original: Instance) -> Certificate:
    vs = cur.variables
    n = len(vs)
    m = [[EQ] * n for _ in range(n)]
    for a, b in itertools.permutations(range(n), 2):
        (m[a][b],) = dom[(vs[a], vs[b])]
    labeling = FiniteStructure(n, tuple(tuple(r) for r in m))
    cert = Certificate(tuple(tuple(groups[v]) for v in vs), labeling)
    assert embeds_into_core(labeling, core), "quotient hits a bound; minimality was not established"
    assert verify_certificate(cert, original, core), "certificate does not satisfy the input"
    return cert


def _cross_check(res: SolveResult, inst: Instance, core: BinaryCore) -> None:
    if len(inst.variables) > ORACLE_CAP:
        res.notes.append(f"oracle skipped: more than {ORACLE_CAP} variables")
        return
    cert = brute_force_solve(inst, core)
    sat = cert is not None
    if res.status is Status.IMPLICATIONALLY_HARD:
        res.notes.append(f"oracle: {'satisfiable' if sat else 'unsatisfiable'}")
        if sat:
            res.certificate = cert
    elif sat != (res.status is Status.SAT):
        res.notes.append(f"oracle disagrees: solver {res.status.value}, oracle "
                         f"{'SAT' if sat else 'UNSAT'}")
    else:
        res.notes.append("oracle agrees")
