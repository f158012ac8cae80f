"""Implication graph of a (2, l)-minimal instance and sink narrowing.

Vertices are ``((v1, v2), C)`` where ``C`` is a nonempty proper subset of
the pair domain, taken over all unions of orbitals.  An arc ``u -> w``
exists when some constraint, projected to three or four of its variables,
efficiently entails ``C_u(u.pair) => C_w(w.pair)``.  Every orientation of
the two pairs inside the projection is considered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import EQ
from .minimality import Constraint, Instance, verify_minimality
from .relalg.implications import Arrow
from .relalg.relation import Relation, entails_no_equalities, nonempty_proper_subsets, project


class GraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ImpVertex:
    pair: tuple
    labels: frozenset

    def key(self, order: dict) -> tuple:
        return (order[self.pair[0]], order[self.pair[1]], sorted(self.labels))


@dataclass(frozen=True)
class ArcWitness:
    constraint: int
    variables: tuple  # x1..x3 or x1..x4, ordered as in the relation
    L: Arrow
    P: Arrow


@dataclass
class ImpGraph:
    variables: tuple
    domains: dict  # ordered pair -> frozenset of codes
    vertices: list = field(default_factory=list)
    arcs: dict = field(default_factory=dict)  # (src, dst) -> ArcWitness

    def successors(self) -> dict:
        out = {v: [] for v in self.vertices}
        for (a, b) in self.arcs:
            out[a].append(b)
        return out

    def order(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}


def _domains(inst: Instance) -> dict:
    dom = {}
    for c in inst.constraints:
        for i, j in itertools.permutations(range(len(c.scope)), 2):
            key = (c.scope[i], c.scope[j])
            if key not in dom:
                dom[key] = frozenset(int(x) for x in np.unique(c.relation.column(i, j)))
    return dom


def build_graph(inst: Instance, check: bool = False, l: int = 3) -> ImpGraph:
    """Implication graph of a minimal instance that entails no equalities."""
    if check and not verify_minimality(inst, 2, l):
        raise GraphError("instance is not (2, l)-minimal")
    if inst.is_trivial():
        raise GraphError("instance is trivial")
    dom = _domains(inst)
    for (x, y), d in dom.items():
        if d == frozenset({EQ}):
            raise GraphError(f"instance entails {x} = {y}; merge equal variables first")
    order = {v: i for i, v in enumerate(inst.variables)}
    g = ImpGraph(inst.variables, dom)
    for (x, y) in sorted(dom, key=lambda p: (order[p[0]], order[p[1]])):
        for c in nonempty_proper_subsets(dom[(x, y)]):
            g.vertices.append(ImpVertex((x, y), c))
    seen = set()
    for ci, con in enumerate(inst.constraints):
        if len(con.scope) < 3:
            continue
        for size in (3, 4):
            for pos in itertools.combinations(range(len(con.scope)), size):
                vars_ = tuple(con.scope[p] for p in pos)
                R = project(con.relation, pos)
                tag = (frozenset(zip(vars_, range(size))), hash(R), vars_)
                if tag in seen:
                    continue
                seen.add(tag)
                if not entails_no_equalities(R):
                    continue
                _arcs_from(g, ci, vars_, R)
    return g


def _arcs_from(g: ImpGraph, ci: int, vars_: tuple, R: Relation) -> None:
    k = len(vars_)
    if k == 3:
        shapes = []
        for m in range(3):
            ends = [i for i in range(3) if i != m]
            for e1, e2 in (ends, ends[::-1]):
                for L, P in itertools.product(Arrow, Arrow):
                    first = (e1, m) if L is Arrow.FWD else (m, e1)
                    second = (m, e2) if P is Arrow.FWD else (e2, m)
                    shapes.append((first, second, (e1, m, e2), L, P))
    else:
        shapes = []
        for p, q in itertools.permutations(range(4), 2):
            r, s = [i for i in range(4) if i not in (p, q)]
            for rr, ss in ((r, s), (s, r)):
                shapes.append(((p, q), (rr, ss), (p, q, rr, ss), Arrow.FWD, Arrow.FWD))
    for first, second, xs, L, P in shapes:
        src = (vars_[first[0]], vars_[first[1]])
        dst = (vars_[second[0]], vars_[second[1]])
        dsrc, ddst = g.domains[src], g.domains[dst]
        if len(dsrc) < 2 or len(ddst) < 2:
            continue
        a, b = R.column(*first), R.column(*second)
        if set(int(x) for x in a) != dsrc or set(int(x) for x in b) != ddst:
            continue
        for c1 in nonempty_proper_subsets(dsrc):
            img = frozenset(int(y) for x, y in zip(a, b) if int(x) in c1)
            if img == ddst:
                continue
            rest = sorted(ddst - img)
            for r in range(len(rest)):
                for extra in itertools.combinations(rest, r):
                    d1 = img | frozenset(extra)
                    key = (ImpVertex(src, c1), ImpVertex(dst, d1))
                    if key not in g.arcs:
                        g.arcs[key] = ArcWitness(ci, tuple(vars_[i] for i in xs), L, P)


def find_cycle(g: ImpGraph) -> Optional[list]:
    """A directed cycle as a vertex list ``[v0, v1, ..., v0]``, or None."""
    succ = g.successors()
    order = g.order()
    for v in succ:
        succ[v].sort(key=lambda w: w.key(order))
    color = {v: 0 for v in g.vertices}
    for root in g.vertices:
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        path = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
                path.pop()
                continue
            if color[nxt] == 1:
                i = path.index(nxt)
                return path[i:] + [nxt]
            if color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succ[nxt])))
                path.append(nxt)
    return None


def cycle_arcs(g: ImpGraph, cycle: list) -> list:
    return [g.arcs[(cycle[i], cycle[i + 1])] for i in range(len(cycle) - 1)]


def find_sink_singleton(g: ImpGraph, inst: Optional[Instance] = None,
                        prefer: str = "smallest") -> Optional[ImpVertex]:
    """A vertex without outgoing arcs, ties broken by label-set size then key.

    ``prefer="smallest"`` tries single orbitals first; ``"largest"`` picks the
    weakest narrowing.
    """
    has_out = {a for a, _ in g.arcs}
    order = g.order()
    sinks = [v for v in g.vertices if v not in has_out]
    if not sinks:
        return None
    sign = 1 if prefer == "smallest" else -1
    return min(sinks, key=lambda v: (sign * len(v.labels), v.key(order)))


class NarrowingError(AssertionError):
    pass


def narrow(inst: Instance, pair: tuple, C, check: bool = False, l: int = 3) -> Instance:
    """Restrict every constraint containing ``pair`` to labels in ``C``."""
    v1, v2 = pair
    codes = C.codes if isinstance(C, Relation) else frozenset(C)
    cons = []
    for c in inst.constraints:
        if v1 in c.scope and v2 in c.scope:
            i, j = c.scope.index(v1), c.scope.index(v2)
            cons.append(Constraint(c.scope, c.relation.select(i, j, codes)))
        else:
            cons.append(c)
    out = Instance(inst.variables, tuple(cons), inst.names)
    if check:
        if out.is_trivial():
            raise NarrowingError("narrowing produced an empty relation")
        if not verify_minimality(out, 2, l):
            raise NarrowingError("narrowing broke (2, l)-minimality")
    return out


def graph_to_json(g: ImpGraph, signature) -> dict:
    def vj(v):
        return {"pair": list(v.pair), "C": sorted(signature.name(c) for c in v.labels)}

    order = g.order()
    arcs = sorted(g.arcs.items(), key=lambda kv: (kv[0][0].key(order), kv[0][1].key(order)))
    return {
        "vertices": [vj(v) for v in g.vertices],
        "arcs": [{"from": vj(a), "to": vj(b), "constraint": w.constraint,
                  "witness": {"variables": list(w.variables), "L": w.L.ascii, "P": w.P.ascii}}
                 for (a, b), w in arcs],
    }


def graph_to_dot(g: ImpGraph, signature) -> str:
    def name(v):
        labs = "|".join(sorted(signature.name(c) for c in v.labels))
        return f'"({v.pair[0]},{v.pair[1]}):{labs}"'

    lines = ["digraph G {"]
    for v in g.vertices:
        lines.append(f"  {name(v)};")
    for (a, b), w in g.arcs.items():
        lines.append(f'  {name(a)} -> {name(b)} [label="c{w.constraint}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
