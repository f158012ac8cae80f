import itertools

import pytest
from hypothesis import given, settings, strategies as st

from corewidth.core import (
    EQ,
    BinaryCore,
    CoreSignature,
    FiniteStructure,
    bound_embeds,
    coherent_labelings,
    embeds_into_core,
    extend_witness,
    is_liberal,
    max_bound,
    validate_core,
)
from corewidth.corpus import CORES, load_core

from oracles import _naive_embeds


def graph_sig():
    return CoreSignature.from_names(["E", "N"], {"E": "E", "N": "N"})


def tri(sig, ab, bc, ac):
    c = sig.code
    return FiniteStructure.from_pairs(3, {(0, 1): c(ab), (1, 2): c(bc), (0, 2): c(ac)}, sig)


@pytest.mark.parametrize("name", CORES)
def test_bundled_cores_valid(name):
    assert validate_core(load_core(name)) == []


def test_liberality_and_max_bound():
    assert is_liberal(load_core("random_graph")) and max_bound(load_core("random_graph")) == 3
    assert is_liberal(load_core("henson_p7")) and max_bound(load_core("henson_p7")) == 7
    tc = load_core("two_cliques")
    assert not is_liberal(tc) and max_bound(tc) == 3


def test_two_cliques_encodes_forbidden_triangles():
    tc = load_core("two_cliques")
    sig = tc.signature
    assert not embeds_into_core(tri(sig, "E", "E", "N"), tc)
    assert not embeds_into_core(tri(sig, "N", "N", "N"), tc)
    assert embeds_into_core(tri(sig, "E", "E", "E"), tc)
    assert embeds_into_core(tri(sig, "E", "N", "N"), tc)


def test_size_two_bound_rejected():
    sig = graph_sig()
    b = FiniteStructure.from_pairs(2, {(0, 1): sig.code("E")}, sig)
    diags = validate_core(BinaryCore(sig, (b,)))
    assert any("absorbed" in d.message for d in diags)


def test_broken_involution_and_incoherent_bound():
    sig = CoreSignature.from_names(["A", "B", "N"], {"A": "B", "B": "N", "N": "N"})
    assert any("involution" in d.message for d in validate_core(BinaryCore(sig)))
    sig = CoreSignature.from_names(["A", "Ai"], {"A": "Ai", "Ai": "A"})
    a = sig.code("A")
    bad = FiniteStructure(3, ((EQ, a, a), (a, EQ, a), (sig.inv(a), sig.inv(a), EQ)))
    diags = validate_core(BinaryCore(sig, (bad,)))
    assert diags and "bounds[0][0,1]" in str(diags[0])


def test_duplicate_and_isomorphic_bounds():
    sig = graph_sig()
    t1, t2 = tri(sig, "E", "E", "N"), tri(sig, "N", "E", "E")
    diags = validate_core(BinaryCore(sig, (t1, t2)))
    assert [d.location for d in diags] == ["bounds[1]"]
    dup = CoreSignature.from_names(["E", "E"], {"E": "E"})
    assert any("duplicate" in d.message for d in validate_core(BinaryCore(dup)))


def test_bound_embeds_examples():
    sig = graph_sig()
    e3 = tri(sig, "E", "E", "E")
    assert bound_embeds(e3, e3) == (0, 1, 2)
    E, N = sig.code("E"), sig.code("N")
    four = FiniteStructure.from_pairs(4, {(0, 1): N, (0, 2): E, (0, 3): N, (1, 2): E,
                                          (1, 3): E, (2, 3): N}, sig)
    m = bound_embeds(tri(sig, "E", "E", "N"), four)
    assert m is not None and len(set(m)) == 3
    clique = FiniteStructure.from_pairs(5, {p: E for p in itertools.combinations(range(5), 2)}, sig)
    assert bound_embeds(tri(sig, "N", "N", "N"), clique) is None


def test_henson_bound_is_excluded():
    h = load_core("henson_p7")
    assert not embeds_into_core(h.bounds[0], h)


def structures(sig, max_n=5):
    codes = list(sig.codes)

    @st.composite
    def build(draw):
        n = draw(st.integers(0, max_n))
        pairs = list(itertools.combinations(range(n), 2))
        labs = draw(st.lists(st.sampled_from(codes), min_size=len(pairs), max_size=len(pairs)))
        return FiniteStructure.from_pairs(n, dict(zip(pairs, labs)), sig)
    return build()


DIG = load_core("liberal_digraph")
TC = load_core("two_cliques")


@given(structures(DIG.signature))
def test_label_coherence(s):
    for i, j in itertools.permutations(range(s.n), 2):
        assert s.label(j, i) == DIG.signature.inv(s.label(i, j))


@given(structures(DIG.signature, 3), structures(DIG.signature, 5))
@settings(max_examples=200)
def test_bound_embeds_agrees_with_naive(g, d):
    m = bound_embeds(g, d)
    naive = g.n <= d.n and _naive_embeds(g, d.labels, DIG)
    assert (m is not None) == naive
    if m is not None:
        assert len(set(m)) == g.n
        assert all(d.label(m[a], m[b]) == g.label(a, b)
                   for a, b in itertools.permutations(range(g.n), 2))


@given(structures(DIG.signature, 3), structures(DIG.signature, 3), st.randoms())
def test_planted_bound_is_found(g, rest, rnd):
    # disjoint union with arbitrary cross labels still contains g
    n = g.n + rest.n
    m = [[EQ] * n for _ in range(n)]
    for i, j in itertools.permutations(range(g.n), 2):
        m[i][j] = g.label(i, j)
    for i, j in itertools.permutations(range(rest.n), 2):
        m[g.n + i][g.n + j] = rest.label(i, j)
    for i in range(g.n):
        for j in range(g.n, n):
            c = rnd.choice(DIG.signature.codes)
            m[i][j], m[j][i] = c, DIG.signature.inv(c)
    assert bound_embeds(g, FiniteStructure.from_matrix(m)) is not None


def test_liberal_shortcut_exhaustive():
    rg = load_core("random_graph")
    for n in range(1, 6):
        assert all(embeds_into_core(s, rg) for s in coherent_labelings(n, rg.signature))


def test_involution_property():
    for name in CORES:
        sig = load_core(name).signature
        for c in sig.codes:
            assert sig.inv(sig.inv(c)) == c
            assert sig.is_symmetric(c) == (sig.inv(c) == c)


def test_extend_witness():
    rg = load_core("random_graph")
    empty = FiniteStructure(0, ())
    assert extend_witness(empty, {}, rg).n == 1
    E = rg.signature.code("E")
    s = FiniteStructure.from_pairs(3, {(0, 1): E, (0, 2): E, (1, 2): E}, rg.signature)
    out = extend_witness(s, {0: E}, rg)
    assert out.n == 4 and out.label(0, 3) == E and out.induced(range(3)) == s
    # lexicographic first success: free labels default to the first code
    assert out.label(1, 3) == rg.signature.codes[0]


def test_extend_witness_blocked_by_bound():
    h = load_core("henson_p7")
    b = h.bounds[0]
    six = b.induced(range(6))
    pinned = {p: b.label(p, 6) for p in range(6)}
    assert extend_witness(six, pinned, h) is None
    assert extend_witness(six, dict(list(pinned.items())[:5]), h) is not None


def test_extend_witness_over_two_cliques():
    sig = TC.signature
    E = sig.code("E")
    s = FiniteStructure.from_pairs(2, {(0, 1): E}, sig)
    out = extend_witness(s, {0: E}, TC)
    assert out.label(1, 2) == E
    assert extend_witness(s, {0: E, 1: sig.code("N")}, TC) is None


def test_extend_witness_rejects_bad_pins():
    rg = load_core("random_graph")
    s = FiniteStructure(1, ((EQ,),))
    with pytest.raises(ValueError):
        extend_witness(s, {0: EQ}, rg)
    with pytest.raises(ValueError):
        extend_witness(s, {3: 1}, rg)
