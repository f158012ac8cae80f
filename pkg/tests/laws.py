"""Bowtie law checks over liberal cores, cross-checked on explicit points.

Tuple shapes: a ternary ``O1 O2``-tuple has ``(t1, t2)`` in O1 and
``(t2, t3)`` in O2; a quaternary one has ``(t1, t2)`` in O1 and
``(t3, t4)`` in O2.
"""
import itertools

from corewidth.relalg.ppjoin import pp_apply

from helpers import pair_of, rel
from oracles import _inv, brute_orbits, rowset, tuple_join

# (template, arity of inputs, points, R1 points, R2 points, visible)
SHAPES = {
    "bowtie3": (3, 4, (0, 1, 3), (3, 1, 2), (0, 1, 2)),
    "bowtie4": (4, 6, (0, 1, 4, 5), (5, 4, 2, 3), (0, 1, 2, 3)),
    "bowtie_3": (4, 5, (0, 1, 3, 4), (4, 3, 1, 2), (0, 1, 2)),
}


def shape_pairs(k):
    return ((0, 1), (1, 2)) if k == 3 else ((0, 1), (2, 3))


def labels_of(row, k):
    a, b = shape_pairs(k)
    return pair_of(row, k, *a), pair_of(row, k, *b)


def block(core, k, o1, o2, injective=True):
    """All tuples of the given shape, optionally only the injective ones."""
    out = []
    for r in brute_orbits(core, k):
        if labels_of(r, k) == (o1, o2) and (not injective or 0 not in r):
            out.append(r)
    return out


def nonconstant_eqeq(core):
    return [r for r in brute_orbits(core, 4)
            if labels_of(r, 4) == (0, 0) and any(x != 0 for x in r)]


def planted(core, k, rng, blocks, density):
    rows = {r for r in brute_orbits(core, k) if rng.random() < density}
    for b in blocks:
        rows.update(b)
    return rel(core, k, rows)


def oracle(tid, R1, R2):
    k, n, p1, p2, vis = SHAPES[tid]
    return tuple_join([(rowset(R1), p1), (rowset(R2), p2)], vis, n, R1.core)


def check_pair(tid, R1, R2):
    """Violations of the bowtie laws for one pair of inputs; also returns
    how many law premises were met."""
    core = R1.core
    k = R1.arity
    R3 = pp_apply(tid, [R1, R2])
    out = []
    r3 = rowset(R3)
    if r3 != oracle(tid, R1, R2):
        out.append("kernel join differs from explicit evaluation")
    k3 = R3.arity
    codes = [0] + list(core.signature.codes)
    s1, s2 = rowset(R1), rowset(R2)
    lab1 = {}
    for r in s1:
        lab1.setdefault(labels_of(r, k), []).append(r)
    lab2 = {}
    for r in s2:
        lab2.setdefault(labels_of(r, k), []).append(r)
    have3 = {labels_of(r, k3) for r in r3}
    premises = 0
    if tid != "bowtie_3":
        for o1, o2, o3 in itertools.product(codes, repeat=3):
            t1s = lab1.get((o1, o2), [])
            t2s = lab2.get((_inv(core, o2), o3), [])
            if not t1s or not t2s:
                continue
            premises += 1
            if (o1, o3) not in have3:
                out.append(f"no {o1}{o3}-tuple from {o1}{o2} and {o2}^-1{o3}")
            inj = any(0 not in t for t in t1s) and any(0 not in t for t in t2s)
            if inj and not set(block(core, k3, o1, o3)) <= r3:
                out.append(f"missing injective {o1}{o3}-tuples")
            if k == 4 and (o1, o2, o3) == (0, 0, 0):
                nc1 = any(any(x != 0 for x in t) for t in t1s)
                nc2 = any(any(x != 0 for x in t) for t in t2s)
                if nc1 and nc2 and not set(nonconstant_eqeq(core)) <= r3:
                    out.append("missing non-constant == tuples")
    anti = list(core.signature.codes)
    for o1, o2, o3 in itertools.product(anti, repeat=3):
        if not (set(block(core, k, o1, o2)) <= s1
                and set(block(core, k, _inv(core, o2), o3)) <= s2):
            continue
        premises += 1
        full = {r for r in brute_orbits(core, 3)
                if pair_of(r, 3, 0, 1) == o1 and pair_of(r, 3, 1, 2) == o3}
        if tid == "bowtie4":
            continue
        if not full <= r3:
            out.append(f"missing {o1}(x1,x2) & {o3}(x2,x3)")
    if tid == "bowtie_3":
        eq = set(nonconstant_eqeq(core))
        if eq <= s1 and eq <= s2:
            premises += 1
            if (0, 0, 0) not in r3:
                out.append("missing the constant tuple")
    return out, premises
