"""Hot search kernels over pair-label assignments.

Everything that enumerates orbits (full relations, padding constraints,
pp-joins) reduces to one problem: label every pair of ``n`` points with an
orbital code (0 is equality) so that

* each triangle is coherent (equal points see the same labels),
* each atom's label tuple lies in its table,
* optionally, no bound of the core embeds,

and report the distinct label vectors on a designated prefix of "visible"
pairs.  Two implementations are provided:

``dfs``  depth-first search with existential short-cutting on the hidden
         pairs, compiled with numba when available.
``bfs``  level-by-level numpy expansion with column retirement (a small
         dynamic program); no compilation needed.

``COREWIDTH_NUMBA=0`` forces the numpy path.  Both return identical results;
``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

try:  # pragma: no cover - import guard
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def numba_enabled() -> bool:
    """True when the compiled DFS kernel is used."""
    flag = os.environ.get("COREWIDTH_NUMBA", "1").strip().lower()
    return _HAVE_NUMBA and flag not in ("0", "false", "no", "off")


def _njit(func):
    if _HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


@dataclass
class PairProblem:
    """A compiled pair-labeling search problem.

    Pairs are referred to by *position* in the search order; the first
    ``n_vis`` positions are the visible pairs, in output order.
    """

    n_points: int
    n_labels: int
    inv: np.ndarray  # (n_labels,)
    n_vis: int
    domain: np.ndarray  # (P, n_labels) bool
    tri_ptr: np.ndarray  # (P + 1,)
    tri: np.ndarray  # (T, 3) positions of (pq, pr, qr) for p < q < r
    chk_ptr: np.ndarray  # (P + 1,)
    chk_pos_ptr: np.ndarray  # (C + 1,) slices into chk_pos
    chk_pos: np.ndarray
    chk_key_ptr: np.ndarray  # (C + 1,) slices into chk_keys
    chk_keys: np.ndarray  # sorted per slice
    pos_of: np.ndarray  # (n, n) position of pair (min, max); -1 on diagonal
    check_embed: bool = False
    bounds: np.ndarray = field(default_factory=lambda: np.zeros((0, 1, 1), np.int64))
    bound_sizes: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    @property
    def n_pairs(self) -> int:
        return self.domain.shape[0]


# ---------------------------------------------------------------------------
# compiled depth-first search
# ---------------------------------------------------------------------------


@_njit
def _point_label(labels, pos_of, inv, p, q):
    if p == q:
        return 0
    if p < q:
        return labels[pos_of[p, q]]
    return inv[labels[pos_of[q, p]]]


@_njit
def _bound_embeds(labels, pos_of, inv, n, g, s):
    # backtracking over images of the bound's points
    img = np.full(s, -1, np.int64)
    a = 0
    while a >= 0:
        img[a] += 1
        if img[a] >= n:
            img[a] = -1
            a -= 1
            continue
        ok = True
        for b in range(a):
            if _point_label(labels, pos_of, inv, img[b], img[a]) != g[b, a]:
                ok = False
                break
        if not ok:
            continue
        if a == s - 1:
            return True
        a += 1
    return False


@_njit
def _embed_ok(labels, pos_of, inv, n, bounds, sizes):
    for i in range(bounds.shape[0]):
        s = sizes[i]
        if s <= n and _bound_embeds(labels, pos_of, inv, n, bounds[i], s):
            return False
    return True


@_njit
def _check_position(d, labels, inv, tri_ptr, tri, chk_ptr, chk_pos_ptr, chk_pos,
                    chk_key_ptr, chk_keys, base):
    for t in range(tri_ptr[d], tri_ptr[d + 1]):
        la = labels[tri[t, 0]]
        lb = labels[tri[t, 1]]
        lc = labels[tri[t, 2]]
        if la == 0 and lb != lc:
            return False
        if lb == 0 and la != inv[lc]:
            return False
        if lc == 0 and la != lb:
            return False
    for c in range(chk_ptr[d], chk_ptr[d + 1]):
        key = 0
        mul = 1
        for i in range(chk_pos_ptr[c], chk_pos_ptr[c + 1]):
            key += labels[chk_pos[i]] * mul
            mul *= base
        lo = chk_key_ptr[c]
        hi = chk_key_ptr[c + 1]
        j = lo + np.searchsorted(chk_keys[lo:hi], key)
        if j >= hi or chk_keys[j] != key:
            return False
    return True


@_njit
def _dfs(n_points, n_labels, inv, n_vis, domain, tri_ptr, tri, chk_ptr,
         chk_pos_ptr, chk_pos, chk_key_ptr, chk_keys, pos_of, check_embed,
         bounds, sizes):
    P = domain.shape[0]
    labels = np.full(P, -1, np.int64)
    found = set()
    found.add(np.int64(-1))
    found.discard(np.int64(-1))
    d = 0
    while d >= 0:
        lab = labels[d] + 1
        ok = False
        while lab < n_labels:
            if domain[d, lab]:
                labels[d] = lab
                if _check_position(d, labels, inv, tri_ptr, tri, chk_ptr,
                                   chk_pos_ptr, chk_pos, chk_key_ptr,
                                   chk_keys, n_labels):
                    ok = True
                    break
            lab += 1
        if not ok:
            labels[d] = -1
            d -= 1
            continue
        if d == n_vis - 1 and d < P - 1:
            key = np.int64(0)
            mul = np.int64(1)
            for i in range(n_vis):
                key += labels[i] * mul
                mul *= n_labels
            if key in found:
                continue
        if d == P - 1:
            if check_embed and not _embed_ok(labels, pos_of, inv, n_points,
                                             bounds, sizes):
                continue
            key = np.int64(0)
            mul = np.int64(1)
            for i in range(n_vis):
                key += labels[i] * mul
                mul *= n_labels
            found.add(key)
            if n_vis < P:
                for e in range(n_vis, P):
                    labels[e] = -1
                d = n_vis - 1
            continue
        d += 1
    out = np.empty(len(found), np.int64)
    i = 0
    for k in found:
        out[i] = k
        i += 1
    return np.sort(out)


def _decode(keys: np.ndarray, n_vis: int, n_labels: int) -> np.ndarray:
    rows = np.empty((len(keys), n_vis), np.int64)
    rest = keys.copy()
    for i in range(n_vis):
        rows[:, i] = rest % n_labels
        rest //= n_labels
    return rows


def solve_dfs(pp: PairProblem) -> np.ndarray:
    keys = _dfs(pp.n_points, pp.n_labels, pp.inv, pp.n_vis, pp.domain,
                pp.tri_ptr, pp.tri, pp.chk_ptr, pp.chk_pos_ptr, pp.chk_pos,
                pp.chk_key_ptr, pp.chk_keys, pp.pos_of, pp.check_embed,
                pp.bounds, pp.bound_sizes)
    return _unique_rows(_decode(keys, pp.n_vis, pp.n_labels))


# ---------------------------------------------------------------------------
# numpy breadth-first fallback
# ---------------------------------------------------------------------------


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    if rows.shape[1] == 0:
        return rows[:1]
    return np.unique(rows, axis=0)


def _last_use(pp: PairProblem) -> np.ndarray:
    last = np.arange(pp.n_pairs)
    for d in range(pp.n_pairs):
        for t in range(pp.tri_ptr[d], pp.tri_ptr[d + 1]):
            last[pp.tri[t]] = np.maximum(last[pp.tri[t]], d)
        for c in range(pp.chk_ptr[d], pp.chk_ptr[d + 1]):
            ps = pp.chk_pos[pp.chk_pos_ptr[c]:pp.chk_pos_ptr[c + 1]]
            last[ps] = np.maximum(last[ps], d)
    return last


def embed_mask(rows: np.ndarray, col_of_pos: dict, pp: PairProblem) -> np.ndarray:
    """Rows (full labelings) into which no bound embeds."""
    n = pp.n_points
    keep = np.ones(rows.shape[0], bool)
    if rows.shape[0] == 0:
        return keep

    def label(p, q):
        if p < q:
            return rows[:, col_of_pos[pp.pos_of[p, q]]]
        return pp.inv[rows[:, col_of_pos[pp.pos_of[q, p]]]]

    for g, s in zip(pp.bounds, pp.bound_sizes):
        if s > n:
            continue
        hit = np.zeros(rows.shape[0], bool)
        for img in itertools.permutations(range(n), int(s)):
            m = np.ones(rows.shape[0], bool)
            for a in range(s):
                for b in range(a + 1, s):
                    m &= label(img[a], img[b]) == g[a, b]
            hit |= m
        keep &= ~hit
    return keep


def solve_bfs(pp: PairProblem) -> np.ndarray:
    P = pp.n_pairs
    last = _last_use(pp)
    rows = np.zeros((1, 0), np.int64)
    cols: list[int] = []
    for d in range(P):
        labs = np.flatnonzero(pp.domain[d])
        m = rows.shape[0]
        rows = np.concatenate(
            [np.repeat(rows, len(labs), axis=0), np.tile(labs, m)[:, None]], axis=1)
        cols.append(d)
        idx = {p: i for i, p in enumerate(cols)}
        keep = np.ones(rows.shape[0], bool)
        for t in range(pp.tri_ptr[d], pp.tri_ptr[d + 1]):
            a, b, c = (rows[:, idx[p]] for p in pp.tri[t])
            keep &= ~((a == 0) & (b != c))
            keep &= ~((b == 0) & (a != pp.inv[c]))
            keep &= ~((c == 0) & (a != b))
        for k in range(pp.chk_ptr[d], pp.chk_ptr[d + 1]):
            key = np.zeros(rows.shape[0], np.int64)
            mul = 1
            for p in pp.chk_pos[pp.chk_pos_ptr[k]:pp.chk_pos_ptr[k + 1]]:
                key += rows[:, idx[p]] * mul
                mul *= pp.n_labels
            keys = pp.chk_keys[pp.chk_key_ptr[k]:pp.chk_key_ptr[k + 1]]
            keep &= np.isin(key, keys)
        rows = rows[keep]
        if d == P - 1 and pp.check_embed:
            rows = rows[embed_mask(rows, idx, pp)]
        if not pp.check_embed:
            live = [i for i, p in enumerate(cols) if p < pp.n_vis or last[p] > d]
            if len(live) < len(cols):
                rows = rows[:, live]
                cols = [cols[i] for i in live]
        rows = _unique_rows(rows)
        if rows.shape[0] == 0:
            return np.zeros((0, pp.n_vis), np.int64)
    idx = {p: i for i, p in enumerate(cols)}
    return _unique_rows(rows[:, [idx[p] for p in range(pp.n_vis)]])


def solve(pp: PairProblem, method: str | None = None) -> np.ndarray:
    """Distinct visible label rows of all admissible labelings, sorted."""
    if pp.n_pairs == 0:
        return np.zeros((1, 0), np.int64)
    if method is None:
        method = "dfs" if numba_enabled() else "bfs"
    if method == "dfs":
        return solve_dfs(pp)
    if method == "bfs":
        return solve_bfs(pp)
    raise ValueError(f"unknown kernel method {method!r}")


# ---------------------------------------------------------------------------
# problem construction
# ---------------------------------------------------------------------------


def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pq: i for i, pq in enumerate(itertools.combinations(range(n), 2))}


def build_problem(
    n_points: int,
    inv: np.ndarray,
    visible: list[tuple[int, int]],
    atoms: list[tuple[tuple[int, ...], np.ndarray]],
    domains: dict[tuple[int, int], np.ndarray] | None = None,
    bounds: list[np.ndarray] | None = None,
) -> PairProblem | None:
    """Compile a labeling problem; ``None`` when trivially unsatisfiable.

    ``visible`` lists ordered point pairs (flipped pairs are reported through
    the inverse).  Each atom is ``(points, table)`` where ``table`` holds the
    allowed label vectors over the atom's local pairs ``i < j``.  ``domains``
    maps a point pair ``(p, q)`` with ``p < q`` to allowed labels; ``bounds``
    are label matrices whose embedding is forbidden.
    """
    inv = np.asarray(inv, np.int64)
    n_labels = len(inv)
    gidx = _pair_index(n_points)
    n_glob = len(gidx)

    # atoms in global coordinates: (global pair ids, rows)
    glob_atoms: list[tuple[list[int], np.ndarray]] = []
    for pts, table in atoms:
        table = np.asarray(table, np.int64).reshape(-1, len(pts) * (len(pts) - 1) // 2)
        cols: dict[int, list[tuple[int, bool]]] = {}
        keep = np.ones(table.shape[0], bool)
        for c, (i, j) in enumerate(itertools.combinations(range(len(pts)), 2)):
            a, b = pts[i], pts[j]
            if a == b:
                keep &= table[:, c] == 0
            else:
                g = gidx[(min(a, b), max(a, b))]
                cols.setdefault(g, []).append((c, a > b))
        table = table[keep]
        order = sorted(cols)
        vals = np.empty((table.shape[0], len(order)), np.int64)
        agree = np.ones(table.shape[0], bool)
        for k, g in enumerate(order):
            first = None
            for c, flip in cols[g]:
                v = inv[table[:, c]] if flip else table[:, c]
                if first is None:
                    first = v
                else:
                    agree &= v == first
            vals[:, k] = first
        vals = vals[agree]
        if vals.shape[0] == 0:
            return None
        if order:
            glob_atoms.append((order, _unique_rows(vals)))

    dom = np.ones((n_glob, n_labels), bool)
    if domains:
        for (p, q), allowed in domains.items():
            m = np.zeros(n_labels, bool)
            m[np.asarray(list(allowed), np.int64)] = True
            dom[gidx[(p, q)]] &= m
    for order, vals in glob_atoms:
        for k, g in enumerate(order):
            m = np.zeros(n_labels, bool)
            m[vals[:, k]] = True
            dom[g] &= m
    if not dom.any(axis=1).all():
        return None

    # search order: visible first, then greedily the pair that completes most
    vis_glob = []
    for p, q in visible:
        g = gidx[(min(p, q), max(p, q))]
        if g in vis_glob:
            raise ValueError("visible pairs must be distinct")
        vis_glob.append(g)
    seq = list(vis_glob)
    placed = set(seq)
    tri_glob = [(gidx[(p, q)], gidx[(p, r)], gidx[(q, r)])
                for p, q, r in itertools.combinations(range(n_points), 3)]
    while len(seq) < n_glob:
        best, best_score = None, None
        for g in range(n_glob):
            if g in placed:
                continue
            trial = placed | {g}
            done_atoms = sum(1 for o, _ in glob_atoms if g in o and set(o) <= trial)
            done_tri = sum(1 for t in tri_glob if g in t and set(t) <= trial)
            touch = sum(1 for o, _ in glob_atoms if g in o)
            score = (done_atoms, done_tri, touch, -dom[g].sum(), -g)
            if best_score is None or score > best_score:
                best, best_score = g, score
        seq.append(best)
        placed.add(best)
    pos = np.empty(n_glob, np.int64)
    pos[np.array(seq, np.int64)] = np.arange(n_glob)

    pos_of = np.full((n_points, n_points), -1, np.int64)
    for (p, q), g in gidx.items():
        pos_of[p, q] = pos[g]
        pos_of[q, p] = pos[g]

    tri_at: list[list[tuple[int, int, int]]] = [[] for _ in range(n_glob)]
    for t in tri_glob:
        ps = tuple(int(pos[g]) for g in t)
        tri_at[max(ps)].append(ps)

    # every prefix of every atom is checked as soon as it is assigned
    chk_at: list[list[tuple[list[int], np.ndarray]]] = [[] for _ in range(n_glob)]
    for order, vals in glob_atoms:
        ps = pos[np.array(order, np.int64)]
        srt = np.argsort(ps)
        ps, vals = ps[srt], vals[:, srt]
        if n_labels ** len(ps) >= 2 ** 62:
            raise ValueError("atom too wide for the key encoding")
        mul = n_labels ** np.arange(len(ps), dtype=np.int64)
        for t in range(1, len(ps) + 1):
            keys = np.unique(vals[:, :t] @ mul[:t])
            chk_at[int(ps[t - 1])].append((list(ps[:t]), keys))

    tri_ptr = np.zeros(n_glob + 1, np.int64)
    chk_ptr = np.zeros(n_glob + 1, np.int64)
    tri_rows, cpos, cpos_ptr, ckeys, ckey_ptr = [], [], [0], [], [0]
    for d in range(n_glob):
        tri_rows.extend(tri_at[d])
        tri_ptr[d + 1] = len(tri_rows)
        for ps, keys in chk_at[d]:
            cpos.extend(int(x) for x in ps)
            cpos_ptr.append(len(cpos))
            ckeys.extend(int(x) for x in keys)
            ckey_ptr.append(len(ckeys))
        chk_ptr[d + 1] = len(cpos_ptr) - 1

    domain = dom[np.array(seq, np.int64)] if n_glob else np.zeros((0, n_labels), bool)
    if n_vis := len(vis_glob):
        if n_labels ** n_vis >= 2 ** 62:
            raise ValueError("too many visible pairs for the key encoding")

    bl = [np.asarray(b, np.int64) for b in (bounds or []) if len(b) <= n_points]
    if bl:
        smax = max(len(b) for b in bl)
        barr = np.zeros((len(bl), smax, smax), np.int64)
        for i, b in enumerate(bl):
            barr[i, :len(b), :len(b)] = b
        bsz = np.array([len(b) for b in bl], np.int64)
    else:
        barr = np.zeros((0, 1, 1), np.int64)
        bsz = np.zeros(0, np.int64)

    return PairProblem(
        n_points=n_points,
        n_labels=n_labels,
        inv=inv,
        n_vis=n_vis,
        domain=np.ascontiguousarray(domain),
        tri_ptr=tri_ptr,
        tri=np.array(tri_rows, np.int64).reshape(-1, 3),
        chk_ptr=chk_ptr,
        chk_pos_ptr=np.array(cpos_ptr, np.int64),
        chk_pos=np.array(cpos, np.int64),
        chk_key_ptr=np.array(ckey_ptr, np.int64),
        chk_keys=np.array(ckeys, np.int64),
        pos_of=pos_of,
        check_embed=bool(bl),
        bounds=barr,
        bound_sizes=bsz,
    )


def label_rows(
    n_points: int,
    inv,
    visible: list[tuple[int, int]],
    atoms: list[tuple[tuple[int, ...], np.ndarray]],
    domains: dict[tuple[int, int], np.ndarray] | None = None,
    bounds: list[np.ndarray] | None = None,
    method: str | None = None,
) -> np.ndarray:
    """Distinct label vectors on ``visible`` over all admissible labelings.

    Column ``i`` of the result is the label of the ordered pair
    ``visible[i]``.  Rows are sorted and unique.
    """
    inv = np.asarray(inv, np.int64)
    built = build_problem(n_points, inv, visible, atoms, domains, bounds)
    if built is None:
        return np.zeros((0, len(visible)), np.int64)
    rows = solve(built, method)
    for i, (p, q) in enumerate(visible):
        if p > q:
            rows[:, i] = inv[rows[:, i]]
    return _unique_rows(rows)
