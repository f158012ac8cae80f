"""Ternary and quaternary implications and their composition.

The arrow ``L`` orients the first pair of coordinates (``(1,2)`` or
``(2,1)``) and ``P`` orients the second one (``(2,3)``/``(3,2)`` for
ternary relations, ``(3,4)``/``(4,3)`` for quaternary ones).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .ppjoin import pp_apply
from .relation import (
    Relation,
    efficiently_entails,
    entails_no_equalities,
    inverse_binary,
    nonempty_proper_subsets,
    permute,
    project,
)


class Arrow(enum.Enum):
    FWD = "→"
    BWD = "←"

    def __str__(self) -> str:
        return self.value

    @property
    def ascii(self) -> str:
        return "->" if self is Arrow.FWD else "<-"


def first_pair(arity: int, L: Arrow) -> tuple[int, int]:
    return (0, 1) if L is Arrow.FWD else (1, 0)


def second_pair(arity: int, P: Arrow) -> tuple[int, int]:
    a, b = (1, 2) if arity == 3 else (2, 3)
    return (a, b) if P is Arrow.FWD else (b, a)


class CompositionError(ValueError):
    pass


@dataclass(frozen=True)
class ImplicationDesc:
    relation: Relation
    C: Relation
    D: Relation
    C1: Relation
    D1: Relation
    L: Arrow
    P: Arrow
    pp_certified: bool = False

    @property
    def arity(self) -> int:
        return self.relation.arity

    def sort_key(self):
        return (self.L.value, self.P.value, sorted(self.C1.codes), sorted(self.D1.codes))

    def summary(self) -> dict:
        sig = self.relation.core.signature

        def names(r):
            return sorted(sig.name(c) for c in r.codes)

        return {"arity": self.arity, "L": self.L.ascii, "P": self.P.ascii,
                "C": names(self.C), "D": names(self.D), "C1": names(self.C1),
                "D1": names(self.D1), "pp_certified": self.pp_certified}


def is_implication(R: Relation, C: Relation, D: Relation, C1: Relation, D1: Relation,
                   L: Arrow, P: Arrow) -> bool:
    """Check every defining condition of a (C, D, C1, D1, L, P)-implication."""
    if R.arity not in (3, 4) or not entails_no_equalities(R):
        return False
    ij, kl = first_pair(R.arity, L), second_pair(R.arity, P)
    if project(R, ij) != C or project(R, kl) != D:
        return False
    return efficiently_entails(R, C1, ij, D1, kl)


def classify_implication(R: Relation, expectedC: Optional[Relation] = None,
                         expectedD: Optional[Relation] = None,
                         known: Iterable[Relation] = ()) -> tuple[ImplicationDesc, ...]:
    """Every implication descriptor of ``R`` with C1, D1 unions of orbitals.

    Descriptors whose C1 and D1 both appear in ``known`` are flagged as
    pp-certified.
    """
    if R.arity not in (3, 4) or not entails_no_equalities(R):
        return ()
    known_codes = {k.codes for k in known}
    core = R.core
    out = []
    for L, P in itertools.product(Arrow, Arrow):
        ij, kl = first_pair(R.arity, L), second_pair(R.arity, P)
        C, D = project(R, ij), project(R, kl)
        if expectedC is not None and C != expectedC:
            continue
        if expectedD is not None and D != expectedD:
            continue
        first, second = R.column(*ij), R.column(*kl)
        dcodes = D.codes
        for c1 in nonempty_proper_subsets(C.codes):
            img = {int(x) for x, y in zip(second, first) if int(y) in c1}
            rest = sorted(dcodes - img)
            for r in range(len(rest)):
                for extra in itertools.combinations(rest, r):
                    d1 = frozenset(img) | frozenset(extra)
                    if not d1 or d1 == dcodes:
                        continue
                    out.append(ImplicationDesc(
                        R, C, D, Relation.binary(core, c1), Relation.binary(core, d1), L, P,
                        pp_certified=(c1 in known_codes and d1 in known_codes)))
    out.sort(key=ImplicationDesc.sort_key)
    return tuple(out)


def describe(R: Relation, C1: Relation, D1: Relation, L: Arrow, P: Arrow) -> ImplicationDesc:
    """Descriptor for given C1, D1 and arrows with projections read off ``R``."""
    C = project(R, first_pair(R.arity, L))
    D = project(R, second_pair(R.arity, P))
    d = ImplicationDesc(R, C, D, C1, D1, L, P)
    if not is_implication(R, C, D, C1, D1, L, P):
        raise CompositionError("relation is not an implication with these parameters")
    return d


def circ_template(d1: ImplicationDesc, d2: ImplicationDesc) -> str:
    same = d1.P is d2.L
    tag = "same" if same else "different"
    return f"circ{d1.arity}{d2.arity}{tag}"


def circ(d1: ImplicationDesc, d2: ImplicationDesc, check: bool = True) -> ImplicationDesc:
    """Compose two chained implications; the result keeps ``(L1, P2)``."""
    if d1.D != d2.C or d1.D1 != d2.C1:
        raise CompositionError("descriptors are not composable")
    R3 = pp_apply(circ_template(d1, d2), [d1.relation, d2.relation])
    d3 = ImplicationDesc(R3, d1.C, d2.D, d1.C1, d2.D1, d1.L, d2.P,
                         pp_certified=d1.pp_certified and d2.pp_certified)
    if check and not is_implication(R3, d3.C, d3.D, d3.C1, d3.D1, d3.L, d3.P):
        raise CompositionError(
            f"composition via {circ_template(d1, d2)} is not an implication")
    return d3


def circ_power(d: ImplicationDesc, k: int, check: bool = True) -> ImplicationDesc:
    if k < 1:
        raise ValueError("power must be at least 1")
    out = d
    for _ in range(k - 1):
        out = circ(out, d, check)
    return out


def flip_to_fwd_bwd(d: ImplicationDesc) -> tuple[ImplicationDesc, tuple[int, ...]]:
    """Normalize a quaternary descriptor to arrows (→, ←).

    Returns the new descriptor and the coordinate permutation applied.
    """
    if d.arity != 4:
        raise ValueError("flip normalization applies to quaternary descriptors")
    perm = {
        (Arrow.FWD, Arrow.BWD): (0, 1, 2, 3),
        (Arrow.BWD, Arrow.BWD): (1, 0, 2, 3),
        (Arrow.FWD, Arrow.FWD): (0, 1, 3, 2),
        (Arrow.BWD, Arrow.FWD): (1, 0, 3, 2),
    }[(d.L, d.P)]
    R = permute(d.relation, perm)
    return replace(d, relation=R, L=Arrow.FWD, P=Arrow.BWD), perm


def reinterpret_bwd_fwd(d: ImplicationDesc) -> ImplicationDesc:
    """A ternary (←, →) descriptor read as (→, ←) over inverted relations."""
    if d.arity != 3 or (d.L, d.P) != (Arrow.BWD, Arrow.FWD):
        raise ValueError("expects a ternary (←, →) descriptor")
    return replace(d, C=inverse_binary(d.C), D=inverse_binary(d.D),
                   C1=inverse_binary(d.C1), D1=inverse_binary(d.D1),
                   L=Arrow.FWD, P=Arrow.BWD)
