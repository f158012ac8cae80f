"""Compare the compiled DFS kernel with the numpy BFS fallback.

Each workload is run with both methods; outputs must agree row for row.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from corewidth import _kernels
from corewidth.corpus import load_core, load_language
from corewidth.relalg import from_formula
from corewidth.relalg.ppjoin import exist_join


def join(atoms, visible, core):
    def run(method):
        return exist_join(atoms, visible, core, method=method).rows
    return run


def workloads():
    dig = load_core("liberal_digraph")
    rg = load_core("random_graph")
    henson = load_core("henson_p7")
    _, p4 = load_language("en_ne_liberal")
    R = p4["R"]
    Q = from_formula(rg, 4, "(E(1,2) & 3=4) | (N(1,2) & 3!=4)")
    T = from_formula(dig, 3, "(A(1,2) & A(3,2)) | (Ai(1,2) & N(3,2)) | (N(1,2) & Ai(3,2))")
    return [
        ("orbits arity 5, 3 orbitals", _full(dig, 5)),
        ("orbits arity 6, 2 orbitals", _full(rg, 6)),
        ("orbits arity 5, tournament bound", _full(henson, 5)),
        ("ternary bowtie of bowties", join([(R, "abd"), (R, "dbc"), (R, "ceg"), (R, "gef")],
                                           "abf", rg)),
        ("quaternary bowtie", join([(Q, "abef"), (Q, "fecd")], "abcd", rg)),
        ("3-orbital chain, 6 points", join([(T, "axy"), (T, "yxb"), (T, "bzc")], "abc", dig)),
    ]


def _full(core, k):
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def run(method):
        return _kernels.label_rows(k, core.inv, pairs, [], None, core.bound_matrices(),
                                   method=method)
    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels._HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    loads = workloads()
    # compile once outside the timings
    for _, run in loads[:1]:
        run("dfs")
    print(f"{'workload':38s} {'rows':>7s} {'dfs (s)':>9s} {'bfs (s)':>9s} {'ratio':>7s}")
    for name, run in loads:
        best = {}
        out = {}
        for method in ("dfs", "bfs"):
            times = []
            for _ in range(args.repeat):
                t = time.perf_counter()
                out[method] = run(method)
                times.append(time.perf_counter() - t)
            best[method] = min(times)
        assert np.array_equal(out["dfs"], out["bfs"]), f"kernels disagree on {name}"
        ratio = best["bfs"] / best["dfs"] if best["dfs"] > 0 else float("inf")
        print(f"{name:38s} {len(out['dfs']):7d} {best['dfs']:9.4f} {best['bfs']:9.4f} {ratio:7.1f}")


if __name__ == "__main__":
    main()
