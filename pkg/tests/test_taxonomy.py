import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from k3fano.fanolattice import saturate
from k3fano.golay import build_golay, fo_graph
from k3fano.graph import ColoredGraph
from k3fano.taxonomy import (DiagramType, NotAdmittedSignature, SearchConfig, classify, decompose,
                             diagram, find_fiber, fundamental_cycle, girth, hyperbolic_type,
                             independence_number, pencil_of, patterns,
                             section_multiplicity_consistent)

# Coxeter numbers: the fundamental cycle of an affine diagram sums to h
COXETER = {"~A2": 3, "~A3": 4, "~A5": 6, "~D4": 6, "~D5": 8, "~D7": 12, "~E6": 12, "~E7": 18, "~E8": 30}


@pytest.mark.parametrize("name", sorted(COXETER))
def test_affine_diagrams(name):
    t = DiagramType.parse(name)
    g = diagram(t)
    assert g.n == t.size
    assert [c for c, _ in decompose(g).components] == [t]
    k = fundamental_cycle(g)
    assert sum(k) == COXETER[name]
    assert hyperbolic_type(g) == "parabolic"


@pytest.mark.parametrize("name", ["A1", "A4", "D4", "D6", "E6", "E7", "E8"])
def test_finite_diagrams(name):
    t = DiagramType.parse(name)
    g = diagram(t)
    assert [c for c, _ in decompose(g).components] == [t]
    assert decompose(g).milnor == t.rank
    assert hyperbolic_type(g) == "elliptic"


def test_not_dynkin():
    # a vertex of valency five is neither finite nor affine
    star5 = ColoredGraph.from_edges(6, [(0, k) for k in range(1, 6)])
    with pytest.raises(NotAdmittedSignature):
        decompose(star5)


def test_girth_classes():
    tri = ColoredGraph.from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    assert classify(tri).girth_class == "triangular"
    c5 = ColoredGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert girth(c5) == 5 and classify(c5).girth_class == "pentagonal"
    assert girth(ColoredGraph([[0, 2], [2, 0]], [1, 1])) == 2
    assert girth(ColoredGraph.from_edges(3, [(0, 1)])) == float("inf")


@st.composite
def simple_graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    edges = [(i, j) for i in range(n) for j in range(i) if draw(st.booleans())]
    return ColoredGraph.from_edges(n, edges)


@given(simple_graphs())
def test_independence_number_matches_brute_force(g):
    best = 0
    for k in range(g.n, 0, -1):
        if any(all(g.adjacency[a][b] == 0 for a, b in itertools.combinations(s, 2))
               for s in itertools.combinations(range(g.n), k)):
            best = k
            break
    assert independence_number(g) == best


@pytest.fixture(scope="module")
def kummer32():
    ctx = build_golay()
    return saturate(fo_graph(), 8, ctx.kernel_64(ctx.S[6][0])).plain


def test_classification_is_isomorphism_invariant(kummer32):
    rng = random.Random(5)
    graphs = [kummer32, ColoredGraph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6)])]
    for g in graphs:
        c = classify(g)
        for _ in range(5):
            p = list(range(g.n))
            rng.shuffle(p)
            d = classify(g.permuted(p))
            assert (d.signature_class, d.fiber_type, d.girth, d.independence) == \
                   (c.signature_class, c.fiber_type, c.girth, c.independence)


def test_kummer32_has_sixteen_disjoint_lines(kummer32):
    assert independence_number(kummer32) >= 16


def test_pencils_of_the_32_line_graph(kummer32):
    t = classify(kummer32).fiber_type
    fiber = find_fiber(kummer32, t)
    view = pencil_of(kummer32, fiber)
    assert view.pi_bound_holds()
    assert section_multiplicity_consistent(kummer32, view)


def test_pencil_with_two_fibers():
    # two disjoint triangles; vertex 6 meets both, vertex 7 meets only the first
    g = ColoredGraph.from_edges(8, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (6, 0), (6, 3), (7, 1)])
    view = pencil_of(g, [0, 1, 2])
    assert len(view.fibers) == 2
    assert view.multiplicity == {6: 1, 7: 1}
    assert view.pi_bound_holds()
    assert section_multiplicity_consistent(g, view) is False   # 7 misses the second fiber


# -------------------------------------------------------------- patterns

def _dihedral4():
    rots = [tuple((i + k) % 4 for i in range(4)) for k in range(4)]
    refl = [tuple((k - i) % 4 for i in range(4)) for k in range(4)]
    return rots + refl


def _lex_max(p, group):
    for g in group:
        q = [0] * len(p)
        for i, x in enumerate(p):
            q[g[i]] = x
        if tuple(q) > tuple(p):
            return False
    return True


def _d4_patterns_by_hand():
    leaves = list(itertools.permutations(range(1, 5)))
    group = [(0,) + tuple(p) for p in leaves]
    out = []
    for p in itertools.product(range(4), *[range(7)] * 4):
        # central vertex has valency 4, leaves valency 1
        if all(p[i] + 1 <= p[0] + 4 for i in range(1, 5)) and _lex_max(p, group):
            out.append(p)
    return out


def _a3_patterns_by_hand():
    return [p for p in itertools.product(range(6), repeat=4) if _lex_max(p, _dihedral4())]


def test_d4_pattern_table_matches_hand_enumeration():
    table = patterns("~D4", 3)
    assert sorted(table.patterns) == sorted(_d4_patterns_by_hand())
    assert len(table) == 441


def test_a3_pattern_table_matches_hand_enumeration():
    table = patterns("~A3", 3, bounds=[5, 5, 5, 5])
    assert sorted(table.patterns) == sorted(_a3_patterns_by_hand())
    assert len(table) == 231


@pytest.mark.parametrize("rho,subset,M", [({}, [0], 0), ({0: 2}, [1, 2], 11), ({0: 3, 1: 4}, [2, 3, 4], 16),
                                          ({1: 0}, [0, 1, 2, 3, 4], 5)])
def test_range_matches_direct_filter(rho, subset, M):
    table = patterns("~D4", 3)
    direct = {sum(p[i] for i in subset) for p in _d4_patterns_by_hand()
              if all(p[i] == v for i, v in rho.items()) and sum(p) >= M}
    assert table.range(rho, subset, M) == direct


def test_search_config_from_dict():
    cfg = SearchConfig.from_dict({"fiber": "~A3", "m": 3})
    assert cfg.fiber_type == DiagramType("A", 3)
    assert len(cfg.pattern_table()) == len(patterns("~A3", 3))
    with pytest.raises(ValueError):
        SearchConfig.from_dict({"fiber": "~A3", "colour": 1})
    with pytest.raises(ValueError):
        SearchConfig(M=10, M_Sigma=6, M_Pi=6)
