import random

import pytest

from k3fano.canon import canonicalize
from k3fano.fanolattice import build
from k3fano.golay import (build_golay, class_profile, fo_graph, golay_code, popcount, triquadric_check,
                          weight_enumerator)
from k3fano.search import Symmetry

import oracles


@pytest.fixture(scope="module")
def ctx():
    return build_golay()


def test_weight_enumerator():
    assert weight_enumerator(golay_code()) == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def test_words_inside_fo(ctx):
    assert len(ctx.C) == 32
    weights = sorted(popcount(c) for c in ctx.C)
    assert weights == [0] + [8] * 30 + [16]


def test_class_splitting(ctx):
    assert class_profile(ctx) == {((4, 4), (8, 24), (12, 4)): 35, ((6, 16), (10, 16)): 28}
    assert len(ctx.S[6]) == len(ctx.S[10]) == 448
    assert len(ctx.S[4]) + len(ctx.S[8]) + len(ctx.S[12]) == 1120


def test_complement_swaps_lengths(ctx):
    for n, sets in ctx.S.items():
        assert sorted(ctx.bar(s) for s in sets) == ctx.S[16 - n]


def _gf2_rank(vectors):
    rows, rank = list(vectors), 0
    for bit in range(16):
        p = next((i for i in range(rank, len(rows)) if rows[i] >> bit & 1), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] >> bit & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def test_even_sets_are_traces(ctx):
    # C has dimension 5, so its orthogonal complement has 2^11 elements
    assert _gf2_rank(ctx.C) == 5
    assert sum(len(v) for v in ctx.S.values()) + len(ctx.C) == 2 ** 11
    rng = random.Random(16)
    for _ in range(10 ** 4):
        s = rng.getrandbits(16)
        assert ctx.even_set(s) == ctx.in_S_or_C(s)
    for s in ctx.C + tuple(ctx.S[6][:50]):
        assert ctx.even_set(s)


def test_automorphism_group(ctx):
    assert ctx.aut_order() == 322560
    gens = ctx.aut_generators()
    for g in gens:
        assert sorted(ctx.act(g, c) for c in ctx.C) == sorted(ctx.C)


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
def test_transitive_on_each_length(ctx, n):
    assert len(ctx.orbits(ctx.aut_generators(), ctx.S[n])) == 1


def test_determinant_ladder(ctx):
    dets = [abs(build(fo_graph(), 8, k).det)
            for k in ((), ctx.kernel_fo(), ctx.kernel_64(ctx.S[6][0]), ctx.kernel_256(ctx.S[8][0]))]
    assert dets[0] == 2 ** 20
    assert dets[1] == 2 ** 10          # |K_fo| = 2^5
    assert dets[1] // dets[2] == 4 ** 2    # one more generator of order 4
    assert dets[1] // dets[3] == 2 ** 2    # one more of order 2
    assert dets[2:] == [64, 256]


def test_kernel_generators_are_isotropic(ctx):
    gl = build(fo_graph(), 8)
    gram = gl.lattice.lattice.gram
    for k in ctx.kernel_64(ctx.S[6][0]) + ctx.kernel_256(ctx.S[8][0])[-1:]:
        assert oracles.qf(gram, k) % 2 == 0
        for i in range(len(k)):
            assert sum(gram[i][j] * k[j] for j in range(len(k))).denominator == 1


def _in_kfo_span(ctx, v):
    """v ∈ Z^17 + K_fo: integral h-part, and a half-integral pattern lying in C."""
    if v[0].denominator != 1 or any(x.denominator > 2 for x in v):
        return False
    mask = sum(1 << i for i, x in enumerate(v[1:]) if x.denominator == 2)
    return mask in ctx.C


def test_kernel_orders(ctx):
    k64 = ctx.kernel_64(ctx.S[6][0])[-1]
    k256 = ctx.kernel_256(ctx.S[8][0])[-1]
    times = lambda k, v: tuple(k * x for x in v)
    assert not _in_kfo_span(ctx, times(2, k64)) and _in_kfo_span(ctx, times(4, k64))
    assert not _in_kfo_span(ctx, k256) and _in_kfo_span(ctx, times(2, k256))


def test_kernel_inputs_are_validated(ctx):
    with pytest.raises(ValueError):
        ctx.kernel_64(ctx.S[8][0])
    with pytest.raises(ValueError):
        ctx.kernel_256(ctx.S[6][0])


def test_class_stabilizer_orders(ctx):
    o6, o8 = ctx.S[6][0], ctx.S[8][0]
    assert Symmetry(ctx.incidence_graph([ctx.eclass(o6)]), fo_graph()).order == 11520
    assert Symmetry(ctx.incidence_graph([ctx.eclass(o8)]), fo_graph()).order == 9216


def test_no_3_isotropic_vector_survives_the_kernel(ctx):
    for kernel in (ctx.kernel_64(ctx.S[6][0]), ctx.kernel_256(ctx.S[8][0])):
        res = triquadric_check(ctx, kernel)
        assert res["sylvester_sizes"] == [0, 1, 2]
        assert res["kernel_survivors"] == []
    # K_fo alone has no h-component, so the empty support gets through
    assert triquadric_check(ctx, ctx.kernel_fo())["kernel_survivors"] == [()]


def test_incidence_graph_group_matches_point_action(ctx):
    cf = canonicalize(ctx.incidence_graph())
    assert cf.order == ctx.aut_order()
