"""Finite presentations of homogeneous binary cores.

Labels are small integers: ``EQ`` (0) marks equal points and orbital ``i``
(0-based index) is encoded as ``i + 1``.  A :class:`FiniteStructure` stores
the full label matrix, so the label of ``(j, i)`` is always the inverse of
the label of ``(i, j)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

EQ = 0


@dataclass(frozen=True)
class OrbitalId:
    name: str
    index: int

    @property
    def code(self) -> int:
        return self.index + 1


@dataclass(frozen=True)
class CoreSignature:
    """Orbitals plus their inverse involution (given as orbital indices)."""

    orbitals: tuple[OrbitalId, ...]
    inverse: tuple[int, ...]

    @classmethod
    def from_names(cls, names: Iterable[str], inverse: Mapping[str, str]) -> "CoreSignature":
        names = list(names)
        pos = {n: i for i, n in enumerate(names)}
        orbs = tuple(OrbitalId(n, i) for i, n in enumerate(names))
        inv = tuple(pos[inverse[n]] if inverse.get(n) in pos else -1 for n in names)
        return cls(orbs, inv)

    @property
    def size(self) -> int:
        return len(self.orbitals)

    @property
    def n_labels(self) -> int:
        return len(self.orbitals) + 1

    def inv_codes(self) -> np.ndarray:
        """Inverse as an array over codes (``inv[0] == 0``)."""
        out = np.zeros(self.n_labels, np.int64)
        for o, j in zip(self.orbitals, self.inverse):
            out[o.code] = j + 1 if j >= 0 else -1
        return out

    def inv(self, code: int) -> int:
        if code == EQ:
            return EQ
        return self.inverse[code - 1] + 1

    def code(self, name: str) -> int:
        if name in ("=", "EQ"):
            return EQ
        for o in self.orbitals:
            if o.name == name:
                return o.code
        raise KeyError(f"unknown orbital {name!r}")

    def name(self, code: int) -> str:
        return "=" if code == EQ else self.orbitals[code - 1].name

    def is_symmetric(self, code: int) -> bool:
        return self.inv(code) == code

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(o.code for o in self.orbitals)


@dataclass(frozen=True)
class FiniteStructure:
    """A finite set of points with one label per ordered pair.

    ``labels[i][j]`` is the code of ``(i, j)``; the diagonal holds ``EQ``.
    """

    n: int
    labels: tuple[tuple[int, ...], ...]

    @classmethod
    def from_pairs(cls, n: int, pairs: Mapping[tuple[int, int], int],
                   signature: CoreSignature) -> "FiniteStructure":
        """Build from labels on (some direction of) every distinct pair."""
        m = [[EQ] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            if (i, j) in pairs:
                c = pairs[(i, j)]
                m[i][j], m[j][i] = c, signature.inv(c)
            elif (j, i) in pairs:
                c = pairs[(j, i)]
                m[j][i], m[i][j] = c, signature.inv(c)
            else:
                raise ValueError(f"missing label for pair ({i}, {j})")
        return cls(n, tuple(tuple(r) for r in m))

    @classmethod
    def from_matrix(cls, m) -> "FiniteStructure":
        m = np.asarray(m, np.int64)
        return cls(int(m.shape[0]), tuple(tuple(int(x) for x in r) for r in m))

    def matrix(self) -> np.ndarray:
        return np.array(self.labels, np.int64).reshape(self.n, self.n)

    def label(self, i: int, j: int) -> int:
        return self.labels[i][j]

    def induced(self, points: Iterable[int]) -> "FiniteStructure":
        pts = list(points)
        return FiniteStructure(len(pts), tuple(tuple(self.labels[a][b] for b in pts) for a in pts))


@dataclass(frozen=True)
class BinaryCore:
    signature: CoreSignature
    bounds: tuple[FiniteStructure, ...] = ()
    name: str = "core"

    @property
    def inv(self) -> np.ndarray:
        return self.signature.inv_codes()

    @property
    def n_orbitals(self) -> int:
        return self.signature.size

    def bound_matrices(self) -> list[np.ndarray]:
        return [b.matrix() for b in self.bounds]


@dataclass(frozen=True)
class Diagnostic:
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


def _structure_diagnostics(s: FiniteStructure, sig: CoreSignature, where: str) -> list[Diagnostic]:
    out = []
    if len(s.labels) != s.n or any(len(r) != s.n for r in s.labels):
        return [Diagnostic(where, "label matrix has the wrong shape")]
    valid = set(sig.codes)
    for i in range(s.n):
        if s.labels[i][i] != EQ:
            out.append(Diagnostic(f"{where}[{i},{i}]", "diagonal must be equality"))
    for i, j in itertools.combinations(range(s.n), 2):
        a, b = s.labels[i][j], s.labels[j][i]
        if a not in valid or b not in valid:
            out.append(Diagnostic(f"{where}[{i},{j}]", "distinct points need an orbital label"))
            continue
        if sig.inv(a) != b:
            sym = a if sig.is_symmetric(a) else b if sig.is_symmetric(b) else None
            if sym is not None:
                out.append(Diagnostic(
                    f"{where}[{i},{j}]",
                    f"{sig.name(sym)} must have a distinct inverse or be declared "
                    "symmetric consistently with bounds"))
            else:
                out.append(Diagnostic(
                    f"{where}[{i},{j}]",
                    f"label {sig.name(b)} of the reversed pair is not the inverse of {sig.name(a)}"))
    return out


def _isomorphic(a: FiniteStructure, b: FiniteStructure) -> bool:
    return a.n == b.n and bound_embeds(a, b) is not None


def validate_core(core: BinaryCore) -> list[Diagnostic]:
    """All violated invariants of ``core``; empty when valid."""
    sig = core.signature
    out: list[Diagnostic] = []
    names = [o.name for o in sig.orbitals]
    if not names:
        out.append(Diagnostic("orbitals", "at least one orbital is required"))
    for n in sorted({n for n in names if names.count(n) > 1}):
        out.append(Diagnostic(f"orbitals.{n}", "duplicate orbital name"))
    for i, o in enumerate(sig.orbitals):
        if o.index != i:
            out.append(Diagnostic(f"orbitals.{o.name}", "indices must be dense from 0"))
    if len(sig.inverse) != len(sig.orbitals):
        out.append(Diagnostic("inverse", "one inverse per orbital is required"))
        return out
    for o, j in zip(sig.orbitals, sig.inverse):
        if not 0 <= j < len(sig.orbitals):
            out.append(Diagnostic(f"orbitals.{o.name}", "inverse is not a declared orbital"))
        elif sig.inverse[j] != o.index:
            out.append(Diagnostic(f"orbitals.{o.name}",
                                  "inverse is not an involution"))
    if out:
        return out
    for k, b in enumerate(core.bounds):
        where = f"bounds[{k}]"
        if b.n < 3:
            out.append(Diagnostic(where, "bound size < 3 is absorbed by the labeling model"))
        out.extend(_structure_diagnostics(b, sig, where))
    for (i, a), (j, b) in itertools.combinations(enumerate(core.bounds), 2):
        if _isomorphic(a, b):
            out.append(Diagnostic(f"bounds[{j}]", f"isomorphic to bounds[{i}]"))
    return out


def is_liberal(core: BinaryCore) -> bool:
    return not any(3 <= b.n <= 6 for b in core.bounds)


def max_bound(core: BinaryCore) -> int:
    return max([3] + [b.n for b in core.bounds])


def bound_embeds(gamma: FiniteStructure, delta: FiniteStructure) -> Optional[tuple[int, ...]]:
    """An injective label-preserving map of ``gamma`` into ``delta``.

    Candidates are tried in lexicographic order, so the first embedding in
    that order is returned.
    """
    if gamma.n > delta.n:
        return None
    if gamma.n == 0:
        return ()
    img: list[int] = []
    used = [False] * delta.n
    cand = [0] * gamma.n
    a = 0
    while a >= 0:
        if len(img) > a:
            used[img.pop()] = False
        found = False
        while cand[a] < delta.n:
            p = cand[a]
            cand[a] += 1
            if used[p]:
                continue
            if all(delta.labels[img[b]][p] == gamma.labels[b][a] for b in range(a)):
                img.append(p)
                used[p] = True
                found = True
                break
        if not found:
            cand[a] = 0
            a -= 1
            continue
        if a == gamma.n - 1:
            return tuple(img)
        a += 1
    return None


def embeds_into_core(delta: FiniteStructure, core: BinaryCore) -> bool:
    return all(bound_embeds(g, delta) is None for g in core.bounds)


def extend_witness(delta: FiniteStructure, pinned: Mapping[int, int],
                   core: BinaryCore) -> Optional[FiniteStructure]:
    """Add one point to ``delta`` that still embeds into the core.

    ``pinned`` maps an existing point ``p`` to the label of ``(p, new)``.
    Remaining labels are chosen by lexicographic first-success search over
    orbital codes.
    """
    sig = core.signature
    n = delta.n
    for p, c in pinned.items():
        if not 0 <= p < n:
            raise ValueError(f"pinned point {p} is not in the structure")
        if c == EQ:
            raise ValueError("a new point cannot be pinned equal to an existing one")
        if c not in sig.codes:
            raise ValueError(f"unknown label code {c}")
    free = [p for p in range(n) if p not in pinned]
    base = delta.matrix()
    for choice in itertools.product(sig.codes, repeat=len(free)):
        m = np.zeros((n + 1, n + 1), np.int64)
        m[:n, :n] = base
        lab = dict(pinned)
        lab.update(zip(free, choice))
        for p, c in lab.items():
            m[p, n] = c
            m[n, p] = sig.inv(c)
        cand = FiniteStructure.from_matrix(m)
        if embeds_into_core(cand, core):
            return cand
    return None


def coherent_labelings(n: int, signature: CoreSignature) -> Iterable[FiniteStructure]:
    """Every injective labeling of ``n`` points (unchecked against bounds)."""
    pairs = list(itertools.combinations(range(n), 2))
    for choice in itertools.product(signature.codes, repeat=len(pairs)):
        yield FiniteStructure.from_pairs(n, dict(zip(pairs, choice)), signature)
