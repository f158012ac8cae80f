"""Bipartite digraphs of (→, ←)-implication pairs and their completion."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..relalg.implications import (
    Arrow,
    CompositionError,
    ImplicationDesc,
    circ_template,
    first_pair,
    is_implication,
    second_pair,
)
from ..relalg.ppjoin import pp_apply
from .trace import Construction

LEFT, RIGHT = "L", "R"


class CompletionError(RuntimeError):
    def __init__(self, msg: str, residual: Optional["BipDigraph"] = None):
        super().__init__(msg)
        self.residual = residual


@dataclass
class BipDigraph:
    codes: tuple  # the common domain C
    arcs: set = field(default_factory=set)  # ((side, code), (side, code))

    @property
    def vertices(self) -> list:
        return [(LEFT, c) for c in self.codes] + [(RIGHT, c) for c in self.codes]

    def successors(self) -> dict:
        out = {v: [] for v in self.vertices}
        for a, b in sorted(self.arcs):
            out[a].append(b)
        return out

    def to_json(self, signature) -> dict:
        def vj(v):
            return f"{signature.name(v[1])}_{v[0]}"
        return {"vertices": [vj(v) for v in self.vertices],
                "arcs": [[vj(a), vj(b)] for a, b in sorted(self.arcs)]}


@dataclass
class BipAnalysis:
    sccs: list  # list of frozensets of vertices, in discovery order
    component: dict  # vertex -> scc index
    sinks: list  # indices of sink components
    sources: list
    complete: bool
    loose_pairs: list  # (left vertex, right vertex) in one scc without a symmetric edge
    smooth: bool

    def codes_of(self, i: int) -> frozenset:
        return frozenset(c for _, c in self.sccs[i])


def _check_fwd_bwd(d: ImplicationDesc) -> None:
    if (d.L, d.P) != (Arrow.FWD, Arrow.BWD):
        raise ValueError("bipartite digraphs need (→, ←)-implications")
    if d.C != d.D:
        raise ValueError("bipartite digraphs need C = D")


def build_bipartite(d1: ImplicationDesc, d2: ImplicationDesc) -> BipDigraph:
    """Arcs ``O_L -> P_R`` from ``d1`` and ``P_R -> O_L`` from ``d2``."""
    _check_fwd_bwd(d1)
    _check_fwd_bwd(d2)
    if d1.C != d2.C:
        raise ValueError("implications over different domains")
    g = BipDigraph(tuple(sorted(d1.C.codes)))
    for d, fwd in ((d1, True), (d2, False)):
        R = d.relation
        a = R.column(*first_pair(R.arity, Arrow.FWD))
        b = R.column(*second_pair(R.arity, Arrow.BWD))
        for x, y in set(zip(a.tolist(), b.tolist())):
            if fwd:
                g.arcs.add(((LEFT, x), (RIGHT, y)))
            else:
                g.arcs.add(((RIGHT, x), (LEFT, y)))
    return g


def _tarjan(vertices: list, succ: dict) -> list:
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on.add(v)
            nxt = succ[v]
            if i < len(nxt):
                work.append((v, i + 1))
                w = nxt[i]
                if w not in index:
                    work.append((w, 0))
                elif w in on:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(frozenset(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return out


def analyze_bipartite(g: BipDigraph) -> BipAnalysis:
    succ = g.successors()
    sccs = _tarjan(g.vertices, succ)
    comp = {v: i for i, s in enumerate(sccs) for v in s}
    out_c = {i: set() for i in range(len(sccs))}
    in_c = {i: set() for i in range(len(sccs))}
    for a, b in g.arcs:
        if comp[a] != comp[b]:
            out_c[comp[a]].add(comp[b])
            in_c[comp[b]].add(comp[a])
    sinks = [i for i in range(len(sccs)) if not out_c[i]]
    sources = [i for i in range(len(sccs)) if not in_c[i]]
    loose = []
    complete = True
    for s in sccs:
        left = sorted(c for side, c in s if side == LEFT)
        right = sorted(c for side, c in s if side == RIGHT)
        if left != right:
            complete = False
        for x in left:
            for y in right:
                u, w = (LEFT, x), (RIGHT, y)
                if (u, w) not in g.arcs or (w, u) not in g.arcs:
                    loose.append((u, w))
    if loose:
        complete = False
    has_out = {a for a, _ in g.arcs}
    has_in = {b for _, b in g.arcs}
    smooth = all(v in has_out and v in has_in for v in g.vertices)
    return BipAnalysis(sccs, comp, sinks, sources, complete, sorted(loose), smooth)


def _distance(g: BipDigraph, src, dst) -> Optional[int]:
    succ = g.successors()
    seen = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        if v == dst:
            return seen[v]
        for w in succ[v]:
            if w not in seen:
                seen[w] = seen[v] + 1
                q.append(w)
    return None


def compose(a: ImplicationDesc, b: ImplicationDesc, build: Optional[Construction] = None,
            an: str = "", bn: str = "") -> tuple[ImplicationDesc, str]:
    """``a ∘ b``, recorded in ``build`` when given."""
    if a.D != b.C or a.D1 != b.C1:
        raise CompositionError("descriptors are not composable")
    tid = circ_template(a, b)
    if build is not None:
        name = build.apply(tid, [an, bn], "c")
        R = build.env[name]
    else:
        name, R = "", pp_apply(tid, [a.relation, b.relation])
    d = ImplicationDesc(R, a.C, b.D, a.C1, b.D1, a.L, b.P, a.pp_certified and b.pp_certified)
    if not is_implication(R, d.C, d.D, d.C1, d.D1, d.L, d.P):
        raise CompositionError(f"composition via {tid} is not an implication")
    return d, name


@dataclass
class Completion:
    desc: ImplicationDesc
    name: str
    iterations: int
    loose_history: list


def make_complete(d1: ImplicationDesc, d2: ImplicationDesc,
                  build: Optional[Construction] = None, names: tuple = ("", ""),
                  cap: Optional[int] = None) -> Completion:
    """Compose along odd paths until the pair's composition is complete.

    A loose pair ``(O_L, P_R)`` missing the arc ``O_L -> P_R`` at distance
    ``2k+1`` is repaired by ``R1 := (R1 ∘ R2)^k ∘ R1``; a missing
    ``P_R -> O_L`` symmetrically repairs ``R2``.  Both directions are fixed
    in one round.
    """
    for d in (d1, d2):
        _check_fwd_bwd(d)
    if d1.C != d2.C or d1.C1 != d2.C1:
        raise ValueError("make_complete needs implications over the same (C, C1)")
    if d1.C1 != d1.D1 or d2.C1 != d2.D1:
        raise ValueError("make_complete needs C1 = D1 on both implications")
    if cap is None:
        cap = max(1, len(d1.relation.core.signature.orbitals) ** 2)
    n1, n2 = names
    history = []
    g = build_bipartite(d1, d2)
    for it in range(1, cap + 1):
        a = analyze_bipartite(g)
        history.append(len(a.loose_pairs))
        if a.loose_pairs:
            u, w = a.loose_pairs[0]
            # repair both directions so the pair stops being loose this round
            for src, dst, fix_first in ((u, w, True), (w, u, False)):
                if (src, dst) in g.arcs:
                    continue
                dist = _distance(g, src, dst)
                if dist is None or dist % 2 == 0:
                    raise CompletionError("loose pair without an odd connecting path", g)
                k = dist // 2
                x, xn, y, yn = (d1, n1, d2, n2) if fix_first else (d2, n2, d1, n1)
                cur, cn = x, xn
                for _ in range(k):
                    cur, cn = compose(cur, y, build, cn, yn)
                    cur, cn = compose(cur, x, build, cn, xn)
                if fix_first:
                    d1, n1 = cur, cn
                else:
                    d2, n2 = cur, cn
                g = build_bipartite(d1, d2)
            continue
        d3, n3 = compose(d1, d2, build, n1, n2)
        g3 = build_bipartite(d3, d3)
        if analyze_bipartite(g3).complete:
            return Completion(d3, n3, it, history)
        d1, n1, d2, n2 = d3, n3, d3, n3
        g = g3
    raise CompletionError(f"no complete implication after {cap} rounds", g)


def as_complete(d: ImplicationDesc) -> bool:
    return analyze_bipartite(build_bipartite(d, d)).complete

