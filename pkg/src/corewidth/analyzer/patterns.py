"""Screen single relations for equality patterns that rule out bounded strict width.

Each matched pattern is turned into a critical ternary relation by a fixed
sequence of template applications, so every finding carries a replayable
trace and a verified :class:`CriticalWitness`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import EQ, is_liberal
from ..relalg.relation import Relation, entails_no_equalities, permute
from .critical import CriticalWitness, critical_failures, define_binary, neq_name
from .trace import Construction

NO_BSW = "no bounded strict width"


@dataclass
class Finding:
    pattern: str
    verdict: str
    witness: CriticalWitness
    permutation: tuple

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "verdict": self.verdict,
                "permutation": list(self.permutation), "witness": self.witness.to_json()}


def _perm(build: Construction, name: str, perm: tuple) -> str:
    if perm == tuple(range(len(perm))):
        return name
    return build.apply("perm:" + ",".join(map(str, perm)), [name], "p")


def _witness(build: Construction, out: str, roles: tuple) -> Optional[CriticalWitness]:
    R = build.env[out]
    if critical_failures(R, *roles):
        return None
    core = build.core
    defs = {}
    for role, codes in zip(("C1", "C2", "D1", "D2"), roles):
        if len(codes) == 1:
            defs[role] = build.orbital(next(iter(codes)))
        else:
            defs[role] = define_binary(build, frozenset(codes), out)
    steps, used = build.parts([out] + [n for n in defs.values() if n])
    rel = [Relation.binary(core, c) for c in roles]
    return CriticalWitness(R, *rel, trace=steps, output=out, definitions=defs, templates=used)


def _o_implies_eq_finish(build: Construction, base: str, O: int) -> Optional[CriticalWitness]:
    """Shared tail: pin ``O`` onto the equality, then bowtie and symmetrize."""
    core = build.core
    sig = core.signature
    arity = build.get(base).arity
    if arity == 3:
        r1 = build.apply("ternary_o_eq", [base, build.orbital(O)], "oq")
        b = build.apply("bowtie3", [r1, r1], "bt")
        r3 = build.apply("bowtie3", [b, b], "bt")
    else:
        r1 = build.apply("quaternary_o_eq", [base, build.orbital(O)], "oq")
        b = build.apply("bowtie4", [r1, r1], "bt")
        r3 = build.apply("bowtie_3", [b, b], "bt")
    r4 = build.apply("meet_rev3", [r3], "crit")
    for P in sig.codes:
        if P == O:
            continue
        roles = ({O}, {P}, {sig.inv(O)}, {sig.inv(P)})
        w = _witness(build, r4, roles)
        if w is not None:
            return w
    return None


def _entails_eq_or_eq_or_eq(R: Relation) -> bool:
    cols = [R.column(0, 1), R.column(1, 2), R.column(0, 2)]
    return bool(np.any(np.stack(cols) == EQ, axis=0).all())


def _eq_or_eq_or_eq(R: Relation, build: Construction, name: str) -> Optional[Finding]:
    if R.arity != 3 or not _entails_eq_or_eq_or_eq(R):
        return None
    neq = neq_name(build)
    if neq is None:
        return None
    sig = build.core.signature
    for perm in itertools.permutations(range(3)):
        p = _perm(build, name, perm)
        r1 = build.apply("neq13", [p, neq], "nq")
        R1 = build.env[r1]
        C = frozenset(int(c) for c in R1.column(0, 1)) - {EQ}
        if not C:
            continue
        r2 = build.apply("twin_hidden", [r1], "crit")
        Cinv = frozenset(sig.inv(c) for c in C)
        w = _witness(build, r2, (C, {EQ}, Cinv, {EQ}))
        if w is not None:
            return Finding("EqOrEqOrEq", NO_BSW, w, perm)
    return None


def _o_implies_eq_orbitals(R: Relation, first: tuple, eq_pair: tuple) -> list[int]:
    """Orbitals ``O`` with ``O(first) => eq_pair equal``, efficiently."""
    a, b = R.column(*first), R.column(*eq_pair)
    out = []
    for O in sorted(set(a.tolist()) - {EQ}):
        hit = a == O
        if (b[hit] == EQ).all() and not (a == O).all():
            out.append(int(O))
    return out


def _ternary_o_eq(R: Relation, build: Construction, name: str) -> Optional[Finding]:
    if R.arity != 3:
        return None
    for perm in itertools.permutations(range(3)):
        Rp = permute(R, perm)
        for O in _o_implies_eq_orbitals(Rp, (0, 1), (1, 2)):
            p = _perm(build, name, perm)
            w = _o_implies_eq_finish(build, p, O)
            if w is not None:
                return Finding("TernaryOImpliesEq", NO_BSW, w, perm)
    return None


def _has_injective(R: Relation) -> bool:
    return bool((R.rows != EQ).all(axis=1).any())


def _quaternary_o_eq(R: Relation, build: Construction, name: str) -> Optional[Finding]:
    if R.arity != 4 or not _has_injective(R):
        return None
    for perm in itertools.permutations(range(4)):
        Rp = permute(R, perm)
        for O in _o_implies_eq_orbitals(Rp, (0, 1), (2, 3)):
            p = _perm(build, name, perm)
            w = _o_implies_eq_finish(build, p, O)
            if w is not None:
                return Finding("QuaternaryOimpliesEq", NO_BSW, w, perm)
    return None


def _eq_or_eq_quaternary(R: Relation, build: Construction, name: str) -> Optional[Finding]:
    if R.arity != 4:
        return None
    sig = build.core.signature
    if len(sig.codes) < 2:
        return None
    for perm in itertools.permutations(range(4)):
        Rp = permute(R, perm)
        a, b = Rp.column(0, 1), Rp.column(2, 3)
        if not ((a == EQ) | (b == EQ)).all():
            continue
        C = sorted(set(a[b == EQ].tolist()) - {EQ})
        p = _perm(build, name, perm)
        for O in C:
            r1 = build.apply("quaternary_eq_or_eq", [p, build.orbital(O)], "eo")
            r2 = build.apply("perm:2,3,0,1", [r1], "p")
            R2 = build.env[r2]
            for P in sig.codes:
                if P == O:
                    continue
                if P not in _o_implies_eq_orbitals(R2, (0, 1), (2, 3)):
                    continue
                if not _has_injective(R2):
                    continue
                w = _o_implies_eq_finish(build, r2, P)
                if w is not None:
                    return Finding("EqOrEqQuaternary", NO_BSW, w, perm)
    return None


def detect_patterns(R: Relation, name: str = "R", build: Optional[Construction] = None) -> list[Finding]:
    """All matched patterns of ``R``; empty for non-liberal cores."""
    core = R.core
    if not is_liberal(core) or R.arity not in (3, 4) or not entails_no_equalities(R):
        return []
    out = []
    for check in (_eq_or_eq_or_eq, _ternary_o_eq, _quaternary_o_eq, _eq_or_eq_quaternary):
        b = build if build is not None else Construction(core, {name: R})
        f = check(R, b, name)
        if f is not None:
            out.append(f)
    return out
