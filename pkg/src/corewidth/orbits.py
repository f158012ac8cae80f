"""Orbits of k-tuples over a binary core.

An orbit is stored as the label of every coordinate pair ``i < j`` in
lexicographic order (``EQ`` when the coordinates are equal).  The equality
pattern and the block labels are derived from that vector, which makes the
representation canonical without any renumbering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .core import EQ, BinaryCore, CoreSignature, FiniteStructure, is_liberal

DEFAULT_ARITY_CAP = 8
ROW_BUDGET = 5_000_000


def pair_columns(k: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(k), 2))


@lru_cache(maxsize=None)
def column_index(k: int) -> dict[tuple[int, int], int]:
    return {p: c for c, p in enumerate(pair_columns(k))}


@dataclass(frozen=True, order=True)
class Orbit:
    arity: int
    labels: tuple[int, ...]

    @property
    def partition(self) -> tuple[int, ...]:
        """Block id per coordinate, blocks numbered by first occurrence."""
        idx = column_index(self.arity)
        block = [-1] * self.arity
        nxt = 0
        for i in range(self.arity):
            for j in range(i):
                if self.labels[idx[(j, i)]] == EQ:
                    block[i] = block[j]
                    break
            if block[i] < 0:
                block[i] = nxt
                nxt += 1
        return tuple(block)

    @property
    def n_blocks(self) -> int:
        return max(self.partition, default=-1) + 1

    def representatives(self) -> list[int]:
        part = self.partition
        return [part.index(b) for b in range(self.n_blocks)]

    @property
    def block_labels(self) -> dict[tuple[int, int], int]:
        reps = self.representatives()
        idx = column_index(self.arity)
        return {(a, b): self.labels[idx[(reps[a], reps[b])]]
                for a, b in itertools.combinations(range(len(reps)), 2)}

    def label(self, i: int, j: int, signature: CoreSignature) -> int:
        if i == j:
            return EQ
        if i < j:
            return self.labels[column_index(self.arity)[(i, j)]]
        return signature.inv(self.labels[column_index(self.arity)[(j, i)]])

    def is_injective(self) -> bool:
        return EQ not in self.labels

    def quotient(self, signature: CoreSignature) -> FiniteStructure:
        reps = self.representatives()
        n = len(reps)
        m = [[self.label(reps[a], reps[b], signature) for b in range(n)] for a in range(n)]
        return FiniteStructure(n, tuple(tuple(r) for r in m))


def is_coherent(arity: int, labels: Sequence[int], signature: CoreSignature) -> bool:
    """Whether a pair-label vector describes an actual equality pattern."""
    idx = column_index(arity)
    inv = signature.inv

    def lab(i, j):
        return labels[idx[(i, j)]] if i < j else inv(labels[idx[(j, i)]])

    for p, q, r in itertools.permutations(range(arity), 3):
        if lab(p, q) == EQ and lab(p, r) != lab(q, r):
            return False
    return True


def canonicalize(arity: int, pattern: Sequence[int],
                 pair_labels: Mapping[tuple[int, int], int],
                 signature: CoreSignature) -> Orbit:
    """Orbit from raw block ids per coordinate and labels between blocks.

    ``pair_labels`` maps raw block pairs (either direction) to codes.  When
    both directions are given they must be inverse to each other.
    """
    if len(pattern) != arity:
        raise ValueError("pattern length differs from arity")
    lab: dict[tuple[int, int], int] = {}
    for (a, b), c in pair_labels.items():
        if a == b:
            raise ValueError("labels are only given between distinct blocks")
        if c == EQ:
            raise ValueError("distinct blocks cannot be labeled as equal")
        for key, val in (((a, b), c), ((b, a), signature.inv(c))):
            if key in lab and lab[key] != val:
                raise ValueError(f"labels of blocks {a},{b} violate the inverse")
            lab[key] = val
    out = []
    for i, j in pair_columns(arity):
        a, b = pattern[i], pattern[j]
        if a == b:
            out.append(EQ)
        elif (a, b) in lab:
            out.append(lab[(a, b)])
        else:
            raise ValueError(f"missing label between blocks {a} and {b}")
    return Orbit(arity, tuple(out))


def orbit_from_structure(s: FiniteStructure, points: Sequence[int]) -> Orbit:
    """Orbit of the tuple ``points`` inside a finite structure."""
    k = len(points)
    return Orbit(k, tuple(s.labels[points[i]][points[j]] for i, j in pair_columns(k)))


def count_bound(core: BinaryCore, k: int) -> int:
    """Number of partition-times-labeling candidates of arity ``k``."""
    total = 0
    # Stirling numbers of the second kind by recurrence
    row = [1]
    for n in range(1, k + 1):
        new = [0] * (n + 1)
        for b in range(1, n + 1):
            new[b] = (row[b - 1] if b - 1 < len(row) else 0) + b * (row[b] if b < len(row) else 0)
        row = new
    for b, s in enumerate(row):
        total += s * core.n_orbitals ** (b * (b - 1) // 2)
    return total


def full_rows(core: BinaryCore, k: int, domains=None, cap: int = DEFAULT_ARITY_CAP) -> np.ndarray:
    """Label rows of every orbit of arity ``k`` realized in the core.

    ``domains`` optionally restricts pair ``(i, j)`` (``i < j``) to a label
    set, which keeps large arities tractable.
    """
    if k < 0:
        raise ValueError("arity must be non-negative")
    if k > cap and not is_liberal(core):
        raise ValueError(f"arity {k} exceeds the enumeration cap {cap}")
    if domains is None and count_bound(core, k) > ROW_BUDGET:
        raise ValueError(f"too many orbits of arity {k} to enumerate")
    if k <= 1:
        return np.zeros((1, 0), np.int64)
    rows = _kernels.label_rows(k, core.inv, pair_columns(k), [], domains,
                               core.bound_matrices())
    return rows


def rows_to_orbits(k: int, rows: np.ndarray) -> tuple[Orbit, ...]:
    return tuple(Orbit(k, tuple(int(x) for x in r)) for r in rows)


def enumerate_orbits(core: BinaryCore, k: int, cap: int = DEFAULT_ARITY_CAP) -> tuple[Orbit, ...]:
    """All orbits of k-tuples, sorted."""
    if k < 1:
        raise ValueError("arity must be at least 1")
    return rows_to_orbits(k, full_rows(core, k, cap=cap))


def restrict_orbit(o: Orbit, indices: Sequence[int], signature: CoreSignature) -> Orbit:
    """Orbit of the sub-tuple at ``indices`` (in that order)."""
    for i in indices:
        if not 0 <= i < o.arity:
            raise IndexError(f"index {i} outside arity {o.arity}")
    m = len(indices)
    return Orbit(m, tuple(o.label(indices[a], indices[b], signature)
                          for a, b in pair_columns(m)))


def pair_label(o: Orbit, i: int, j: int, core: BinaryCore) -> int:
    if i == j:
        raise ValueError("pair_label needs two distinct coordinates")
    return o.label(i, j, core.signature)
