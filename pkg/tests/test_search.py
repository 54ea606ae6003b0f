import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from k3fano.fanolattice import build
from k3fano.golay import build_golay, fo_graph
from k3fano.graph import ColoredGraph
from k3fano.lattice import LatticeError
from k3fano.search import (BaseData, Extender, PseudoVertex, Symmetry, act_key, add_vertex, drop_vertex,
                           extension_graph, mu_matrix, normalize_config, orbit, orbit_representatives,
                           symmetry_graph)

C4 = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
TRI_PATH = ColoredGraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)])


@pytest.fixture(scope="module")
def fo_base():
    ctx = build_golay()
    return BaseData(fo_graph(), 8, ctx.kernel_fo())


def _full_outcome(base, key):
    g = extension_graph(base.graph, key)
    try:
        gl = build(g, 8, base.pad_kernel(len(key[0])))
    except LatticeError:
        return None
    return gl


def test_rejected_single_vertices_fail_the_full_test(fo_base):
    rng = random.Random(1)
    rejected = 0
    for _ in range(60):
        s = tuple(sorted(rng.sample(range(16), rng.randint(0, 8))))
        v = PseudoVertex.line(s)
        gl = _full_outcome(fo_base, normalize_config([(1, s)], [[0]]))
        if not fo_base.admits(v):
            rejected += 1
            assert gl is None or not gl.master(3).ok
        elif gl is not None:
            # neutral means the new vertex lies in the old span
            growth = gl.rank - fo_base.rank
            assert growth == (0 if fo_base.sylvester(v) == "neutral" else 1)
    assert rejected > 0


@pytest.mark.parametrize("graph", [C4, TRI_PATH])
def test_sylvester_agrees_with_hyperbolicity(graph):
    base = BaseData(graph, 8)
    for k in range(4):
        for s in itertools.combinations(range(graph.n), k):
            v = PseudoVertex.line(s)
            gl = _full_outcome(base, normalize_config([(1, s)], [[0]]))
            assert (base.sylvester(v) != "fail") == (gl is not None)
            if gl is not None:
                assert (gl.rank == base.rank) == (base.sylvester(v) == "neutral")


def test_pair_sylvester_agrees_with_hyperbolicity():
    base = BaseData(C4, 8)
    supports = [s for k in range(3) for s in itertools.combinations(range(4), k)]
    for s, t in itertools.combinations_with_replacement(supports, 2):
        for mu in (0, 1):
            verts = [PseudoVertex.line(s), PseudoVertex.line(t)]
            key = normalize_config([(1, s), (1, t)], [[0, mu], [mu, 0]])
            gl = _full_outcome(base, key)
            assert base.multi_sylvester(verts, [[-2, mu], [mu, -2]], strict=False) == (gl is not None)


# ---------------------------------------------------------------- keys and orbits

@st.composite
def configs(draw):
    r = draw(st.integers(1, 4))
    verts = [(draw(st.sampled_from([0, 1])), tuple(sorted(draw(st.sets(st.integers(0, 3), max_size=3)))))
             for _ in range(r)]
    mu = [[0] * r for _ in range(r)]
    for a in range(r):
        for b in range(a):
            mu[a][b] = mu[b][a] = draw(st.integers(0, 1))
    return verts, mu


@given(configs(), st.randoms())
def test_normalized_key_ignores_vertex_order(cfg, rnd):
    verts, mu = cfg
    p = list(range(len(verts)))
    rnd.shuffle(p)
    shuffled = [verts[i] for i in p]
    mu2 = [[mu[p[a]][p[b]] for b in range(len(p))] for a in range(len(p))]
    assert normalize_config(verts, mu) == normalize_config(shuffled, mu2)


@given(configs())
def test_add_then_drop_round_trip(cfg):
    verts, mu = cfg
    key = normalize_config(verts, mu)
    r = len(verts)
    child = add_vertex(key, (1, (0,)), (1,) * r)
    assert any(drop_vertex(child, i) == key for i in range(r + 1))
    assert len(child[0]) == r + 1


def test_orbits_partition_and_representatives_are_minimal():
    sym = Symmetry(symmetry_graph(C4), C4)
    assert sym.order == 8
    keys = {normalize_config([(1, s)], [[0]]) for k in range(3) for s in itertools.combinations(range(4), k)}
    reps = orbit_representatives(sym.generators, keys)
    union = set()
    for rep, orb in reps.items():
        assert rep == min(orb)
        assert not (union & orb)
        union |= orb
        for g in sym.generators:
            assert all(act_key(g, k) in orb for k in orb)
    assert union == keys
    # empty, a vertex, an edge, a diagonal
    assert len(reps) == 4
    assert len(orbit(sym.generators, normalize_config([(1, (0, 2))], [[0]]))) == 2


# ---------------------------------------------------------------- the extender

def _run_c4(initial, r_max=3):
    base = BaseData(C4, 8)
    return Extender(base, Symmetry(symmetry_graph(C4), C4), initial, m=3, r_max=r_max).run()


C4_INITIAL = [PseudoVertex.line(s) for k in range(3) for s in itertools.combinations(range(4), k)]


@pytest.fixture(scope="module")
def c4_result():
    return _run_c4(C4_INITIAL)


def test_outputs_pass_the_master_test(c4_result):
    assert len(c4_result.plain) > 1
    for c in c4_result.plain:
        assert c.rank < 20
        if not c.key[0]:
            continue
        gl = build(c.graph, 8, c.kernels[0].kernel)
        assert gl.master(3).ok
    for c, _ in c4_result.maxlist:
        assert c.rank == 20


def test_one_output_per_isomorphism_class(c4_result):
    from k3fano.canon import canonicalize
    sym = Symmetry(symmetry_graph(C4), C4)
    certs = [sym.certificate(c.key) for c in c4_result.plain]
    assert len(certs) == len(set(certs))
    # and plain isomorphism of the extension graphs is never finer
    graphs = {canonicalize(c.graph).certificate for c in c4_result.plain}
    assert len(graphs) <= len(certs)


def test_result_does_not_depend_on_candidate_order(c4_result):
    sym = Symmetry(symmetry_graph(C4), C4)
    want = sorted(sym.certificate(c.key) for c in c4_result.plain)
    rng = random.Random(3)
    for _ in range(3):
        init = list(C4_INITIAL)
        rng.shuffle(init)
        got = _run_c4(init)
        assert sorted(sym.certificate(c.key) for c in got.plain) == want
        assert got.survivor_counts() == c4_result.survivor_counts()


def test_unknown_mode_is_rejected():
    with pytest.raises(ValueError):
        Extender(BaseData(C4, 8), mode="eager")
