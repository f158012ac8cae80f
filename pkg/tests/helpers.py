"""Random data generators shared by the tests."""
import itertools
import random

import numpy as np

from corewidth.minimality import Constraint, Instance
from corewidth.relalg.relation import Relation

from oracles import brute_orbits


def rel(core, k, rows):
    rows = sorted(set(rows))
    return Relation(core, k, np.array(rows, np.int64).reshape(len(rows), k * (k - 1) // 2))


def random_relation(core, k, rng, density=0.5, nonempty=True):
    pool = sorted(brute_orbits(core, k))
    while True:
        rows = [r for r in pool if rng.random() < density]
        if rows or not nonempty:
            return rel(core, k, rows)


def random_instance(language, rng, max_vars=6, max_constraints=5, min_vars=2):
    names = sorted(language)
    n = rng.randint(max(min_vars, min(r.arity for r in language.values())), max_vars)
    variables = tuple(f"x{i}" for i in range(n))
    cons, used = [], []
    for _ in range(rng.randint(1, max_constraints)):
        opts = [m for m in names if language[m].arity <= n]
        name = rng.choice(opts)
        scope = tuple(rng.sample(variables, language[name].arity))
        cons.append(Constraint(scope, language[name]))
        used.append(name)
    return Instance(variables, tuple(cons), tuple(used))


def anti_reflexive(core):
    return list(core.signature.codes)


def pair_of(row, k, i, j):
    return row[list(itertools.combinations(range(k), 2)).index((i, j))]


def seeded(seed):
    return random.Random(seed)
