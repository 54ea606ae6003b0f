from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3fano.graph import ColoredGraph
from k3fano.stars import boundary_cases, engine_verdict, violates_star_rules

import oracles

CASES = boundary_cases()


def gram_by_hand(g, degree=8, m_imposed=None):
    """[h, vertices, (ι)] with h² = degree, h·v = color, v² = −2, ι² = 0."""
    n = g.n
    size = n + 1 + (m_imposed is not None)
    G = [[0] * size for _ in range(size)]
    G[0][0] = degree
    for i in range(n):
        G[0][i + 1] = G[i + 1][0] = g.color[i]
        for j in range(n):
            G[i + 1][j + 1] = -2 if i == j else g.adjacency[i][j]
    if m_imposed is not None:
        G[0][-1] = G[-1][0] = m_imposed
        for i in range(n):
            G[i + 1][-1] = G[-1][i + 1] = g.part[i] if g.part is not None else 0
    return G


def witness_holds(g, obs, m_imposed=None):
    G = gram_by_hand(g, m_imposed=m_imposed)
    x = [Fraction(c) for c in obs.vector]
    n = len(G)
    pair = lambda a, b: sum(a[i] * G[i][j] * b[j] for i in range(n) for j in range(n))
    e = lambda k: [int(i == k) for i in range(n)]
    sq, hx = pair(x, x), pair(x, e(0))
    if obs.kind == "sigma+":
        # h² > 0 and a positive vector orthogonal to h: two positive directions
        return sq > 0 and hx == 0
    if any(c.denominator != 1 for c in x):
        return False
    if obs.kind.startswith("isotropic-"):
        return sq == 0 and hx == int(obs.kind.split("-")[1])
    prods = [pair(x, e(v + 1)) for v in range(g.n) if g.color[v] == 1]
    if sq != -2 or hx != 0:
        return False
    if obs.kind == "separating":
        return min(prods) < 0 < max(prods)
    if obs.kind == "iota-separating":
        xi = pair(x, e(n - 1))
        return (xi > 0 and min(prods) < 0) or (xi < 0 and max(prods) > 0)
    return False


@pytest.mark.parametrize("case", CASES, ids=[c.name for c in CASES])
def test_boundary_case(case):
    assert case.obstruction is not None
    assert case.obstruction.kind == case.expected
    assert witness_holds(case.graph, case.obstruction, case.m_imposed)
    assert case.engine() == case.expected
    assert case.ok


def test_named_examples():
    names = {c.name: c.expected for c in CASES}
    assert names["line star A2"] == "isotropic-3"
    assert names["double edge"] == "isotropic-2"


def test_harmless_graphs_pass():
    path = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert violates_star_rules(path, 3) is None
    assert engine_verdict(path, 3) == "ok"
    square = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert violates_star_rules(square, 3) is None


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 7))
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            adj[i][j] = adj[j][i] = draw(st.sampled_from([0, 0, 0, 1, 1, 2]))
    color = [draw(st.sampled_from([1, 1, 1, 0])) for _ in range(n)]
    return ColoredGraph(adj, color)


@settings(max_examples=300)
@given(small_graphs(), st.sampled_from([2, 3]))
def test_local_rules_are_sound(g, m):
    obs = violates_star_rules(g, m)
    if obs is None:
        return
    assert witness_holds(g, obs)
    assert engine_verdict(g, m) != "ok"
