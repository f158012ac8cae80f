"""CSP instances and the (2, l)-minimality fixpoint.

Padding constraints are added for every l-subset of variables not already
inside a scope.  Their full relation is materialized restricted to the pair
domains known at that moment; orbits outside those domains would be removed
by the first revision anyway, so the fixpoint is unchanged.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Optional, Sequence

import numpy as np

from .core import BinaryCore
from .orbits import Orbit, full_rows, pair_columns
from .relalg.relation import Relation, project


@dataclass(frozen=True)
class Constraint:
    scope: tuple
    relation: Relation

    def __post_init__(self):
        if len(self.scope) != self.relation.arity:
            raise ValueError("relation arity differs from scope length")
        if len(set(self.scope)) != len(self.scope):
            raise ValueError("scope entries must be pairwise distinct")


@dataclass(frozen=True)
class Instance:
    variables: tuple
    constraints: tuple[Constraint, ...] = ()
    names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        vs = set(self.variables)
        if len(vs) != len(self.variables):
            raise ValueError("duplicate variables")
        for c in self.constraints:
            if not set(c.scope) <= vs:
                raise ValueError(f"scope {c.scope} uses undeclared variables")

    @property
    def core(self) -> Optional[BinaryCore]:
        return self.constraints[0].relation.core if self.constraints else None

    def index(self) -> dict[Hashable, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def is_trivial(self) -> bool:
        return any(len(c.relation) == 0 for c in self.constraints)


@dataclass(frozen=True)
class TraceEntry:
    step: int
    constraint: int
    removed_orbit: Orbit
    because: dict


class MinimalityResult(NamedTuple):
    instance: Instance
    trivial: bool
    trace: list[TraceEntry]
    padded: Instance


def _subset_covered(subset, scopes) -> bool:
    s = set(subset)
    return any(s <= sc for sc in scopes)


class _Work:
    """Mutable working copy used by the revision loop."""

    def __init__(self, inst: Instance, core: BinaryCore):
        self.core = core
        self.inv = core.inv
        self.vi = inst.index()
        self.scopes: list[tuple[int, ...]] = []
        self.rows: list[np.ndarray] = []
        for c in inst.constraints:
            if c.relation.core != core:
                raise ValueError("constraint relation over a different core")
            self.scopes.append(tuple(self.vi[v] for v in c.scope))
            self.rows.append(np.array(c.relation.rows))
        self._index()

    def _index(self):
        # per constraint: list of (column, global pair, flipped)
        self.cols: list[list[tuple[int, tuple[int, int], bool]]] = []
        self.by_pair: dict[tuple[int, int], list[int]] = {}
        self.by_var: dict[int, list[int]] = {}
        for ci, sc in enumerate(self.scopes):
            lst = []
            for col, (p, q) in enumerate(pair_columns(len(sc))):
                a, b = sc[p], sc[q]
                key = (min(a, b), max(a, b))
                lst.append((col, key, a > b))
                self.by_pair.setdefault(key, []).append(ci)
            for v in sc:
                self.by_var.setdefault(v, []).append(ci)
            self.cols.append(lst)

    def add(self, scope: tuple[int, ...], rows: np.ndarray):
        self.scopes.append(scope)
        self.rows.append(rows)
        self._index()

    def proj(self, ci: int, col: int, flipped: bool) -> set[int]:
        vals = self.rows[ci][:, col]
        if flipped:
            vals = self.inv[vals]
        return set(int(x) for x in np.unique(vals))

    def pair_domains(self) -> dict[tuple[int, int], set[int]]:
        dom: dict[tuple[int, int], set[int]] = {}
        for ci, lst in enumerate(self.cols):
            for col, key, fl in lst:
                p = self.proj(ci, col, fl)
                dom[key] = p if key not in dom else dom[key] & p
        return dom


def _pad(work: _Work, n_vars: int, l: int) -> list[int]:
    scopes = [set(s) for s in work.scopes]
    if n_vars == 0:
        return []
    size = min(l, n_vars)
    need = [s for s in itertools.combinations(range(n_vars), size)
            if not _subset_covered(s, scopes)]
    added = []
    for s in need:
        dom = work.pair_domains()
        local = {}
        for p, q in pair_columns(len(s)):
            key = (s[p], s[q])
            if key in dom:
                local[(p, q)] = sorted(dom[key])
        rows = full_rows(work.core, len(s), domains=local or None, cap=max(8, len(s)))
        work.add(tuple(s), rows)
        added.append(len(work.scopes) - 1)
    return added


def establish_minimality(inst: Instance, l: int, k: int = 2,
                         core: Optional[BinaryCore] = None,
                         rng: Optional[random.Random] = None) -> MinimalityResult:
    """Equivalent (k, l)-minimal instance by pairwise revision.

    Constraints are revised in index order and re-queued on change; with
    ``rng`` the initial queue and every re-queue batch are shuffled instead.
    Only ``k = 2`` is supported.
    """
    if k != 2:
        raise NotImplementedError("only k = 2 is supported")
    if l < k:
        raise ValueError("l must be at least k")
    core = core or inst.core
    if core is None:
        if len(inst.variables) <= 1:
            return MinimalityResult(inst, False, [], inst)
        raise ValueError("a core is required for instances without constraints")
    work = _Work(inst, core)
    n = len(inst.variables)
    n_orig = len(work.scopes)
    _pad(work, n, l)
    padded = _rebuild(inst, work, n_orig)

    dom = work.pair_domains()
    dead: set[int] = set()
    trace: list[TraceEntry] = []
    order = list(range(len(work.scopes)))
    if rng is not None:
        rng.shuffle(order)
    queue = deque(order)
    queued = set(order)

    def enqueue(cis):
        cis = sorted(set(cis) - queued)
        if rng is not None:
            rng.shuffle(cis)
        for c in cis:
            queue.append(c)
            queued.add(c)

    def record(ci, rows, reason):
        for r in rows:
            trace.append(TraceEntry(len(trace), ci, Orbit(len(work.scopes[ci]), tuple(int(x) for x in r)), reason))

    while queue:
        ci = queue.popleft()
        queued.discard(ci)
        rows = work.rows[ci]
        if not len(rows):
            continue
        sc = work.scopes[ci]
        if dead & set(sc):
            v = min(dead & set(sc))
            who = next(c for c in work.by_var[v] if not len(work.rows[c]))
            record(ci, rows, {"variable": inst.variables[v], "constraint": who})
            work.rows[ci] = rows[:0]
        else:
            keep = np.ones(len(rows), bool)
            reasons = [None] * len(rows)
            for col, key, fl in work.cols[ci]:
                vals = rows[:, col] if not fl else work.inv[rows[:, col]]
                ok = np.isin(vals, sorted(dom[key]))
                for r in np.flatnonzero(~ok & keep):
                    lab = int(vals[r])
                    who = next(c for c in work.by_pair[key] if c != ci and lab not in
                               work.proj(c, *next((cc, f) for cc, kk, f in work.cols[c] if kk == key)))
                    reasons[r] = {"pair": [inst.variables[key[0]], inst.variables[key[1]]],
                                  "constraint": who}
                keep &= ok
            if keep.all():
                continue
            for r in np.flatnonzero(~keep):
                record(ci, rows[r:r + 1], reasons[r])
            work.rows[ci] = rows[keep]
        if not len(work.rows[ci]):
            newly = set(sc) - dead
            dead |= newly
            for key in {kk for _, kk, _ in work.cols[ci]}:
                dom[key] = set()
            enqueue(c for v in newly for c in work.by_var[v] if c != ci)
            enqueue(c for _, kk, _ in work.cols[ci] for c in work.by_pair[kk] if c != ci)
            continue
        for col, key, fl in work.cols[ci]:
            p = work.proj(ci, col, fl)
            if p < dom[key]:
                dom[key] = p
                enqueue(c for c in work.by_pair[key] if c != ci)

    out = _rebuild(inst, work, n_orig)
    return MinimalityResult(out, out.is_trivial(), trace, padded)


def _rebuild(inst: Instance, work: _Work, n_orig: int) -> Instance:
    cons = []
    for ci, (sc, rows) in enumerate(zip(work.scopes, work.rows)):
        rel = Relation(work.core, len(sc), rows)
        cons.append(Constraint(tuple(inst.variables[i] for i in sc), rel))
    names = tuple(inst.names) + tuple(f"pad{i}" for i in range(len(cons) - n_orig))
    return Instance(inst.variables, tuple(cons), names if inst.names else ())


def replay_trace(padded: Instance, trace: Sequence[TraceEntry]) -> Instance:
    """Apply recorded removals to the padded instance."""
    removed: dict[int, set] = {}
    for t in trace:
        removed.setdefault(t.constraint, set()).add(t.removed_orbit.labels)
    cons = []
    for ci, c in enumerate(padded.constraints):
        gone = removed.get(ci, set())
        rows = [r for r in c.relation.rows if tuple(int(x) for x in r) not in gone]
        k = c.relation.arity
        rel = Relation(c.relation.core, k,
                       np.array(rows, np.int64).reshape(len(rows), k * (k - 1) // 2))
        cons.append(Constraint(c.scope, rel))
    return Instance(padded.variables, tuple(cons), padded.names)


def _scope_projection(c: Constraint, vars_: Sequence) -> Relation:
    pos = [c.scope.index(v) for v in vars_]
    return project(c.relation, pos)


def pair_domain(inst: Instance, x, y) -> Relation:
    """The common projection of all constraints onto ``(x, y)``."""
    if x == y:
        raise ValueError("pair domain needs two distinct variables")
    projs = [_scope_projection(c, (x, y)) for c in inst.constraints
             if x in c.scope and y in c.scope]
    if not projs:
        raise ValueError(f"no constraint contains both {x!r} and {y!r}")
    if any(p != projs[0] for p in projs[1:]):
        raise ValueError(f"constraints disagree on ({x!r}, {y!r}); instance is not minimal")
    return projs[0]


def verify_minimality(inst: Instance, k: int = 2, l: int = 3) -> bool:
    """Both conditions of (k, l)-minimality, checked literally."""
    scopes = [set(c.scope) for c in inst.constraints]
    n = len(inst.variables)
    size = min(l, n)
    if n and not all(_subset_covered(s, scopes)
                     for s in itertools.combinations(inst.variables, size)):
        return False
    for m in range(1, k + 1):
        for s in itertools.combinations(inst.variables, m):
            projs = [_scope_projection(c, s) for c in inst.constraints if set(s) <= set(c.scope)]
            if any(p != projs[0] for p in projs[1:]):
                return False
    return True
