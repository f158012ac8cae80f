"""Relations as finite sets of orbits.

A relation of arity ``k`` keeps its orbits as a sorted, duplicate-free
integer matrix with one row per orbit and one column per coordinate pair
``i < j`` (see :mod:`corewidth.orbits`).  All indices in this module are
0-based; the textual formula syntax uses 1-based coordinates.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

import numpy as np

from ..core import EQ, BinaryCore
from ..orbits import Orbit, column_index, full_rows, pair_columns, rows_to_orbits


def _unique(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    if rows.shape[1] == 0:
        return rows[:1]
    return np.unique(rows, axis=0)


def _keys(rows: np.ndarray, base: int) -> np.ndarray:
    mul = base ** np.arange(rows.shape[1], dtype=np.int64)
    return rows @ mul if rows.shape[1] else np.zeros(rows.shape[0], np.int64)


class Relation:
    """An arity-``k`` relation over a core, given by its orbits."""

    __slots__ = ("core", "arity", "rows", "_hash")

    def __init__(self, core: BinaryCore, arity: int, rows) -> None:
        ncol = arity * (arity - 1) // 2
        rows = np.asarray(rows, np.int64)
        if rows.ndim != 2 or rows.shape[1] != ncol:
            if ncol == 0:
                rows = np.zeros((rows.shape[0] if rows.ndim else 0, 0), np.int64)
            else:
                rows = rows.reshape(-1, ncol)
        self.core = core
        self.arity = arity
        self.rows = _unique(rows)
        self.rows.setflags(write=False)
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def full(cls, core: BinaryCore, arity: int) -> "Relation":
        return cls(core, arity, full_rows(core, arity))

    @classmethod
    def empty(cls, core: BinaryCore, arity: int) -> "Relation":
        return cls(core, arity, np.zeros((0, arity * (arity - 1) // 2), np.int64))

    @classmethod
    def from_orbits(cls, core: BinaryCore, arity: int, orbits: Iterable[Orbit]) -> "Relation":
        rows = [o.labels for o in orbits if o.arity == arity]
        return cls(core, arity, np.array(rows, np.int64).reshape(len(rows), arity * (arity - 1) // 2))

    @classmethod
    def binary(cls, core: BinaryCore, codes: Iterable[int]) -> "Relation":
        return cls(core, 2, np.array(sorted(set(codes)), np.int64).reshape(-1, 1))

    @classmethod
    def from_formula(cls, core: BinaryCore, arity: int, formula: str) -> "Relation":
        return from_formula(core, arity, formula)

    # access -------------------------------------------------------------
    @property
    def orbits(self) -> tuple[Orbit, ...]:
        return rows_to_orbits(self.arity, self.rows)

    @property
    def codes(self) -> frozenset[int]:
        """Label set of a binary relation."""
        if self.arity != 2:
            raise ValueError("codes() is defined for binary relations only")
        return frozenset(int(x) for x in self.rows[:, 0])

    def column(self, i: int, j: int) -> np.ndarray:
        """Label of the ordered coordinate pair ``(i, j)`` in every orbit."""
        if i == j:
            return np.zeros(len(self), np.int64)
        if i < j:
            return self.rows[:, column_index(self.arity)[(i, j)]]
        return self.core.inv[self.rows[:, column_index(self.arity)[(j, i)]]]

    def select(self, i: int, j: int, codes: Iterable[int]) -> "Relation":
        mask = np.isin(self.column(i, j), np.fromiter(codes, np.int64))
        return Relation(self.core, self.arity, self.rows[mask])

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    def __bool__(self) -> bool:
        return len(self) > 0

    def __contains__(self, o: Orbit) -> bool:
        if o.arity != self.arity:
            return False
        if not self.rows.shape[1]:
            return len(self) > 0
        return bool((self.rows == np.array(o.labels)).all(axis=1).any())

    def key_set(self) -> np.ndarray:
        return _keys(self.rows, self.core.signature.n_labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return (self.arity == other.arity and self.core == other.core
                and self.rows.shape == other.rows.shape
                and bool((self.rows == other.rows).all()))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.arity, self.rows.shape, self.rows.tobytes()))
        return self._hash

    def __le__(self, other: "Relation") -> bool:
        return bool(np.isin(self.key_set(), other.key_set()).all())

    def __repr__(self) -> str:
        if self.arity == 2:
            names = ",".join(self.core.signature.name(c) for c in sorted(self.codes))
            return f"Relation(2, {{{names}}})"
        return f"Relation({self.arity}, {len(self)} orbits)"

    def describe(self) -> list[dict[str, str]]:
        sig = self.core.signature
        return [{f"{i + 1},{j + 1}": sig.name(int(v)) for (i, j), v in zip(pair_columns(self.arity), r)}
                for r in self.rows]


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\|\||\||∨|\bor\b)|(&&|&|∧|\band\b)|(!=|≠)|(=)|(,)|([A-Za-z_][\w'⁻^\-]*)|(\d+))")


def _tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    kinds = ["(", ")", "or", "and", "neq", "eq", ",", "name", "num"]
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse formula near {text[pos:pos + 12]!r}")
        for kind, val in zip(kinds, m.groups()):
            if val is not None:
                out.append((kind, val))
                break
        pos = m.end()
    return out


def _parse(text: str):
    """DNF parser: returns a list of conjunctions of atoms.

    Atoms are ``("orb", name, i, j)``, ``("eq", i, j)`` and ``("neq", i, j)``
    with 1-based coordinates.  Parentheses may group any sub-formula; the
    result is flattened to DNF.
    """
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            raise ValueError(f"expected {kind} in formula {text!r}")
        pos += 1
        return toks[pos - 1][1]

    def var():
        if peek() == "name":
            v = take("name")
            if not re.fullmatch(r"x\d+", v):
                raise ValueError(f"bad variable {v!r}")
            return int(v[1:])
        return int(take("num"))

    def disj():
        terms = conj()
        while peek() == "or":
            take("or")
            terms = terms + conj()
        return terms

    def conj():
        terms = atom()
        while peek() == "and":
            take("and")
            rhs = atom()
            terms = [a + b for a in terms for b in rhs]
        return terms

    def atom():
        if peek() == "(":
            take("(")
            inner = disj()
            take(")")
            return inner
        if peek() == "name" and pos + 1 < len(toks) and toks[pos + 1][0] == "(":
            name = take("name")
            take("(")
            i = var()
            take(",")
            j = var()
            take(")")
            return [[("orb", name, i, j)]]
        i = var()
        if peek() == "eq":
            take("eq")
            return [[("eq", i, var())]]
        take("neq")
        return [[("neq", i, var())]]

    terms = disj()
    if pos != len(toks):
        raise ValueError(f"trailing input in formula {text!r}")
    return terms


def from_formula(core: BinaryCore, arity: int, formula: str) -> Relation:
    """Orbits of arity ``arity`` satisfying a quantifier-free DNF formula."""
    sig = core.signature
    terms = _parse(formula)
    full = Relation.full(core, arity)
    keep = np.zeros(len(full), bool)
    for conj in terms:
        mask = np.ones(len(full), bool)
        for a in conj:
            i, j = a[-2] - 1, a[-1] - 1
            if not (0 <= i < arity and 0 <= j < arity):
                raise ValueError(f"coordinate out of range in {formula!r}")
            col = full.column(i, j)
            if a[0] == "eq":
                mask &= col == EQ
            elif a[0] == "neq":
                mask &= col != EQ
            else:
                try:
                    c = sig.code(a[1])
                except KeyError:
                    raise ValueError(f"unknown orbital {a[1]!r} in formula") from None
                mask &= col == c
        keep |= mask
    return Relation(core, arity, full.rows[keep])


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def project(R: Relation, indices: Sequence[int]) -> Relation:
    """Orbit-wise restriction to the (distinct) coordinates ``indices``."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        raise ValueError("projection indices must be distinct")
    for i in idx:
        if not 0 <= i < R.arity:
            raise IndexError(f"index {i} outside arity {R.arity}")
    m = len(idx)
    cols = [R.column(idx[a], idx[b]) for a, b in pair_columns(m)]
    rows = np.stack(cols, axis=1) if cols else np.zeros((len(R), 0), np.int64)
    return Relation(R.core, m, rows)


def permute(R: Relation, perm: Sequence[int]) -> Relation:
    """``R'(x_1..x_k) = R(x_perm[0], ..., x_perm[k-1])`` (0-based)."""
    if sorted(perm) != list(range(R.arity)):
        raise ValueError("not a permutation of the coordinates")
    # R'(x) holds iff R(x[perm]) holds: coordinate perm[a] of R' is coordinate a of R
    inv = [0] * R.arity
    for a, p in enumerate(perm):
        inv[p] = a
    return project(R, inv)


def combine(R1: Relation, R2: Relation, op: str) -> Relation:
    if R1.arity != R2.arity:
        raise ValueError("arity mismatch")
    if R1.core != R2.core:
        raise ValueError("relations over different cores")
    k1, k2 = R1.key_set(), R2.key_set()
    if op == "and":
        rows = R1.rows[np.isin(k1, k2)]
    elif op == "or":
        rows = np.concatenate([R1.rows, R2.rows])
    elif op == "minus":
        rows = R1.rows[~np.isin(k1, k2)]
    else:
        raise ValueError(f"unknown operation {op!r}")
    return Relation(R1.core, R1.arity, rows)


def inverse_binary(C: Relation) -> Relation:
    if C.arity != 2:
        raise ValueError("inverse of a non-binary relation")
    return project(C, [1, 0])


def complement(R: Relation) -> Relation:
    return combine(Relation.full(R.core, R.arity), R, "minus")


def entails_no_equalities(R: Relation) -> bool:
    if not len(R):
        return False
    return not any(bool((R.rows[:, c] == EQ).all()) for c in range(R.rows.shape[1]))


def entails_implication(R: Relation, C: Relation, ij: tuple[int, int],
                        D: Relation, kl: tuple[int, int]) -> bool:
    """Every orbit with its ``ij`` label in ``C`` has its ``kl`` label in ``D``."""
    hit = np.isin(R.column(*ij), list(C.codes))
    return bool(np.isin(R.column(*kl)[hit], list(D.codes)).all())


def efficiently_entails(R: Relation, C1: Relation, ij: tuple[int, int],
                        D1: Relation, kl: tuple[int, int]) -> bool:
    pc = set(int(x) for x in R.column(*ij))
    pd = set(int(x) for x in R.column(*kl))
    strict = C1.codes < pc and D1.codes < pd
    return strict and entails_implication(R, C1, ij, D1, kl)


def nonempty_proper_subsets(codes: Iterable[int]) -> list[frozenset[int]]:
    """All nonempty proper subsets, ordered by size then lexicographically."""
    items = sorted(codes)
    out = []
    for r in range(1, len(items)):
        out.extend(frozenset(c) for c in itertools.combinations(items, r))
    return out
