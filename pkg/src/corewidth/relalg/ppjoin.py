"""Existential joins and the library of pp-construction templates.

A template lists a number of points, the visible ones (in output order) and
atoms ``(slot, points)``; applying it to relations fills the slots and
evaluates the existential join over orbits of all points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Sequence

from .. import _kernels
from ..core import BinaryCore
from .relation import Relation

DEFAULT_POINT_CAP = 7


def exist_join(atoms: Sequence[tuple[Relation, Sequence[Hashable]]],
               visible: Sequence[Hashable], core: BinaryCore | None = None,
               cap: int = DEFAULT_POINT_CAP, method: str | None = None) -> Relation:
    """Visible orbits of all total orbits satisfying every atom.

    Points are arbitrary hashable names; ``visible`` must list distinct
    points.  Bounds of the core are enforced on the total orbit whenever a
    bound is small enough to embed.
    """
    if core is None:
        if not atoms:
            raise ValueError("a core is needed when there are no atoms")
        core = atoms[0][0].core
    for rel, pts in atoms:
        if rel.core != core:
            raise ValueError("atom relation over a different core")
        if rel.arity != len(pts):
            raise ValueError(f"atom arity {rel.arity} used with {len(pts)} points")
    if len(set(visible)) != len(visible):
        raise ValueError("visible points must be distinct")
    names: dict[Hashable, int] = {}
    for p in list(visible) + [p for _, pts in atoms for p in pts]:
        names.setdefault(p, len(names))
    if len(names) > cap:
        raise ValueError(f"{len(names)} points exceed the join cap {cap}")
    vis = [names[p] for p in visible]
    vis_pairs = [(vis[a], vis[b]) for a in range(len(vis)) for b in range(a + 1, len(vis))]
    katoms = [(tuple(names[p] for p in pts), rel.rows) for rel, pts in atoms]
    rows = _kernels.label_rows(len(names), core.inv, vis_pairs, katoms, None,
                               core.bound_matrices(), method=method)
    return Relation(core, len(vis), rows)


@dataclass(frozen=True)
class PpTemplate:
    tid: str
    n_points: int
    visible: tuple[int, ...]
    atoms: tuple[tuple[int, tuple[int, ...]], ...]
    slot_arities: tuple[int, ...]

    @property
    def n_slots(self) -> int:
        return len(self.slot_arities)

    def apply(self, relations: Sequence[Relation], method: str | None = None) -> Relation:
        if len(relations) != self.n_slots:
            raise ValueError(f"template {self.tid} takes {self.n_slots} relations")
        for r, a in zip(relations, self.slot_arities):
            if r.arity != a:
                raise ValueError(f"template {self.tid}: expected arity {a}, got {r.arity}")
        return exist_join([(relations[s], pts) for s, pts in self.atoms], self.visible,
                          relations[0].core, cap=max(DEFAULT_POINT_CAP, self.n_points),
                          method=method)


def _t(tid, n, visible, atoms, arities):
    return PpTemplate(tid, n, tuple(visible), tuple((s, tuple(p)) for s, p in atoms), tuple(arities))


# Points are numbered visible first, then quantified.
BUILTIN: dict[str, PpTemplate] = {t.tid: t for t in [
    _t("bowtie3", 4, (0, 1, 2), [(0, (0, 1, 3)), (1, (3, 1, 2))], (3, 3)),
    _t("bowtie4", 6, (0, 1, 2, 3), [(0, (0, 1, 4, 5)), (1, (5, 4, 2, 3))], (4, 4)),
    _t("bowtie_3", 5, (0, 1, 2), [(0, (0, 1, 3, 4)), (1, (4, 3, 1, 2))], (4, 4)),
    _t("circ44same", 6, (0, 1, 2, 3), [(0, (0, 1, 4, 5)), (1, (4, 5, 2, 3))], (4, 4)),
    _t("circ44different", 6, (0, 1, 2, 3), [(0, (0, 1, 4, 5)), (1, (5, 4, 2, 3))], (4, 4)),
    _t("circ43same", 5, (0, 1, 2, 3), [(0, (0, 1, 4, 2)), (1, (4, 2, 3))], (4, 3)),
    _t("circ43different", 5, (0, 1, 2, 3), [(0, (0, 1, 2, 4)), (1, (4, 2, 3))], (4, 3)),
    _t("circ34same", 5, (0, 1, 2, 3), [(0, (0, 1, 4)), (1, (1, 4, 2, 3))], (3, 4)),
    _t("circ34different", 5, (0, 1, 2, 3), [(0, (0, 1, 4)), (1, (4, 1, 2, 3))], (3, 4)),
    _t("circ33same", 4, (0, 1, 2, 3), [(0, (0, 1, 2)), (1, (1, 2, 3))], (3, 3)),
    _t("circ33different", 4, (0, 1, 2), [(0, (0, 1, 3)), (1, (3, 1, 2))], (3, 3)),
    # x1 != x2 from two distinct orbitals out of a common point
    _t("apex_neq", 3, (0, 1), [(0, (2, 0)), (1, (2, 1))], (2, 2)),
    _t("twin_hidden", 4, (0, 1, 2), [(0, (0, 1, 3)), (0, (2, 1, 3))], (3,)),
    _t("ternary_o_eq", 4, (0, 1, 2), [(0, (0, 1, 3)), (1, (2, 3))], (3, 2)),
    _t("quaternary_o_eq", 5, (0, 1, 2, 3), [(0, (0, 1, 2, 4)), (1, (3, 4))], (4, 2)),
    _t("quaternary_eq_or_eq", 5, (0, 1, 2, 3), [(0, (0, 1, 2, 4)), (1, (4, 3))], (4, 2)),
    _t("meet_rev3", 3, (0, 1, 2), [(0, (0, 1, 2)), (0, (2, 1, 0))], (3,)),
    _t("neq13", 3, (0, 1, 2), [(0, (0, 1, 2)), (1, (0, 2))], (3, 2)),
    _t("neq_restrict3", 3, (0, 1, 2), [(0, (0, 1, 2)), (1, (0, 1)), (1, (1, 2))], (3, 2)),
    _t("neq_restrict4", 4, (0, 1, 2, 3), [(0, (0, 1, 2, 3)), (1, (0, 1)), (1, (2, 3))], (4, 2)),
    # binary relation read off a ternary one by pinning the last pair
    _t("pin_binary", 3, (0, 1), [(0, (0, 1, 2)), (1, (1, 2))], (3, 2)),
    _t("meet2", 2, (0, 1), [(0, (0, 1)), (1, (0, 1))], (2, 2)),
]}

_USER: dict[str, PpTemplate] = {}


def register_template(t: PpTemplate) -> PpTemplate:
    """Register a user template; ids must start with ``user:``."""
    if not t.tid.startswith("user:"):
        raise ValueError("user template ids must start with 'user:'")
    if t.n_points > DEFAULT_POINT_CAP:
        raise ValueError(f"template declares {t.n_points} points, cap is {DEFAULT_POINT_CAP}")
    used = {p for _, pts in t.atoms for p in pts} | set(t.visible)
    if not used <= set(range(t.n_points)):
        raise ValueError("template uses undeclared points")
    _USER[t.tid] = t
    return t


def get_template(tid: str) -> PpTemplate:
    """Look up a template by id.

    Besides the fixed library two parametric families exist:
    ``perm:a,b,..`` (coordinate permutation) and ``proj:k:a,b,..``
    (projection of a ``k``-ary relation), both 0-based.
    """
    if tid in BUILTIN:
        return BUILTIN[tid]
    if tid in _USER:
        return _USER[tid]
    m = re.fullmatch(r"perm:(\d+(?:,\d+)*)", tid)
    if m:
        perm = tuple(int(x) for x in m.group(1).split(","))
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"bad permutation in {tid!r}")
        return _t(tid, len(perm), range(len(perm)), [(0, perm)], (len(perm),))
    m = re.fullmatch(r"proj:(\d+):(\d+(?:,\d+)*)", tid)
    if m:
        k = int(m.group(1))
        idx = tuple(int(x) for x in m.group(2).split(","))
        if len(set(idx)) != len(idx) or not all(0 <= i < k for i in idx):
            raise ValueError(f"bad projection in {tid!r}")
        return _t(tid, k, idx, [(0, tuple(range(k)))], (k,))
    raise KeyError(f"unknown template {tid!r}")


def pp_apply(tid: str, relations: Sequence[Relation]) -> Relation:
    return get_template(tid).apply(relations)


def bowtie(R1: Relation, R2: Relation) -> Relation:
    if R1.arity != R2.arity or R1.arity not in (3, 4):
        raise ValueError("bowtie needs two ternary or two quaternary relations")
    return pp_apply("bowtie3" if R1.arity == 3 else "bowtie4", [R1, R2])


def bowtie3(R1: Relation, R2: Relation) -> Relation:
    if R1.arity != 4 or R2.arity != 4:
        raise ValueError("bowtie_3 needs two quaternary relations")
    return pp_apply("bowtie_3", [R1, R2])
