import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from k3fano.canon import automorphism_order, canonicalize, isomorphic, sort_extensions
from k3fano.fanolattice import saturate
from k3fano.golay import build_golay, fo_graph
from k3fano.graph import ColoredGraph, read_records, write_records

import oracles

PETERSEN = ColoredGraph.from_edges(
    10, [(i, (i + 1) % 5) for i in range(5)] + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    + [(i, i + 5) for i in range(5)])


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            adj[i][j] = adj[j][i] = draw(st.sampled_from([0, 0, 1, 1, 2]))
    color = [draw(st.integers(0, 1)) for _ in range(n)]
    return ColoredGraph(adj, color)


def _permutation_trials(graphs, total, seed=0):
    rng = random.Random(seed)
    done = 0
    while done < total:
        for g in graphs:
            cert = canonicalize(g).certificate
            p = list(range(g.n))
            rng.shuffle(p)
            h = g.permuted(p)
            assert canonicalize(h).certificate == cert
            done += 1
    return done


def test_certificate_invariant_under_a_thousand_permutations():
    ctx = build_golay()
    k64 = saturate(fo_graph(), 8, ctx.kernel_64(ctx.S[6][0])).extended
    graphs = [PETERSEN, ctx.incidence_graph(), k64,
              ColoredGraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)], color=[1, 1, 1, 0, 1, 0])]
    assert _permutation_trials(graphs, 1000) >= 1000


def test_known_group_orders():
    assert automorphism_order(PETERSEN) == 120
    ctx = build_golay()
    assert canonicalize(ctx.incidence_graph()).order == 322560
    assert automorphism_order(ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])) == 8


@given(small_graphs())
def test_group_order_and_orbits_match_brute_force(g):
    auts = oracles.brute_automorphisms(g.adjacency, g.color)
    cf = canonicalize(g)
    assert cf.order == len(auts)
    assert sorted(tuple(sorted(o)) for o in cf.orbits) == oracles.brute_orbits(auts, g.n)
    for gen in cf.generators:
        assert tuple(gen) in set(auts)


@given(small_graphs(), st.randoms())
def test_isomorphism_agrees_with_brute_force(g, rnd):
    p = list(range(g.n))
    rnd.shuffle(p)
    h = g.permuted(p)
    assert isomorphic(g, h)
    # flip one adjacency and compare against exhaustive search
    if g.n >= 2:
        adj = [list(r) for r in h.adjacency]
        adj[0][1] = adj[1][0] = 1 - min(adj[0][1], 1)
        k = ColoredGraph(adj, h.color)
        brute = any(
            all(k.color[q[i]] == g.color[i] for i in range(g.n))
            and all(k.adjacency[q[i]][q[j]] == g.adjacency[i][j] for i in range(g.n) for j in range(g.n))
            for q in itertools.permutations(range(g.n)))
        assert isomorphic(g, k) == brute


def test_colors_are_respected():
    a = ColoredGraph.from_edges(2, [(0, 1)], color=[1, 0])
    b = ColoredGraph.from_edges(2, [(0, 1)], color=[1, 1])
    assert not isomorphic(a, b)


def test_fixed_set_and_pointwise():
    path = ColoredGraph.from_edges(3, [(0, 1), (1, 2)])
    assert canonicalize(path).order == 2
    assert canonicalize(path, fixed=[0, 2]).order == 2
    assert canonicalize(path, fixed=[0, 2], pointwise=True).order == 1


def test_sort_extensions_keeps_one_per_class():
    base = ColoredGraph.from_edges(3, [(0, 1)])
    # a new vertex attached to 0 or to 1 gives the same class (swap 0, 1)
    g1 = ColoredGraph.from_edges(4, [(0, 1), (0, 3)])
    g2 = ColoredGraph.from_edges(4, [(0, 1), (1, 3)])
    g3 = ColoredGraph.from_edges(4, [(0, 1), (2, 3)])
    out = sort_extensions([g1, g2, g3], base.n)
    assert len(out) == 2


def test_record_round_trip(tmp_path):
    ctx = build_golay()
    graphs = [PETERSEN, ColoredGraph.empty(),
              saturate(fo_graph(), 8, ctx.kernel_64(ctx.S[6][0])).extended]
    path = tmp_path / "g.jsonl"
    write_records(path, graphs)
    back = read_records(path)
    assert len(back) == len(graphs)
    for a, b in zip(graphs, back):
        assert b.to_record() == a.to_record()
        assert canonicalize(a).certificate == canonicalize(b).certificate
