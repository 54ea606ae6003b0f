"""Local rules for stars, common stars and cycles, with explicit witnesses.

Each violated rule comes with a vector in the free coordinates
``[h, v_0, …, v_{n-1}(, ι)]`` of the graph lattice that exhibits the
obstruction: an isotropic vector of small h-degree, a separating root, or a
vector of positive square orthogonal to h (σ+ ≥ 2).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .fanolattice import NotHyperbolic, build, free_gram
from .graph import ColoredGraph


@dataclass
class Obstruction:
    rule: str
    kind: str                 # isotropic-k, separating, iota-separating, sigma+
    vector: tuple             # free coordinates


def _unit(size: int, idx, coeffs=None) -> list:
    v = [Fraction(0)] * size
    for i, c in zip(idx, coeffs or [1] * len(idx)):
        v[i] += c
    return v


def positive_vector(free) -> tuple | None:
    """A vector orthogonal to h (coordinate 0) with positive square, if any."""
    n = len(free)
    h2 = Fraction(free[0][0])
    basis = []
    for i in range(1, n):
        b = [Fraction(0)] * n
        b[i] = h2
        b[0] = -Fraction(free[0][i])
        basis.append(b)
    g = [[la.bilinear(a, free, b) for b in basis] for a in basis]
    m = len(basis)
    t = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    g = [row[:] for row in g]
    active = list(range(m))
    while active:
        k = next((i for i in active if g[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i < j and g[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            for r in range(m):
                g[i][r] += g[j][r]
            for r in range(m):
                g[r][i] += g[r][j]
            t[i] = [a + b for a, b in zip(t[i], t[j])]
            k = i
        if g[k][k] > 0:
            x = [sum(t[k][j] * basis[j][c] for j in range(m)) for c in range(n)]
            return tuple(la.normalize(c) for c in x)
        active.remove(k)
        for i in active:
            f = g[i][k] / g[k][k]
            if f:
                for j in range(m):
                    g[i][j] -= f * g[k][j]
                for j in range(m):
                    g[j][i] = g[i][j] if j in active or j == k else g[j][i]
                t[i] = [a - f * b for a, b in zip(t[i], t[k])]
        for i in active:
            g[i][k] = g[k][i] = Fraction(0)
    return None


def sigma_plus(free) -> int:
    return la.signature(free)[0]


# ------------------------------------------------------------------ star shapes

def star(g: ColoredGraph, v: int) -> list:
    return [w for w in range(g.n) if g.adjacency[v][w] == 1]


def star_shape(g: ColoredGraph, vs) -> tuple:
    """(number of A1, number of A2, other components) of the induced star."""
    sub = g.induced(vs)
    a = b = other = 0
    for comp in sub.components():
        if len(comp) == 1:
            a += 1
        elif len(comp) == 2 and sub.adjacency[comp[0]][comp[1]] == 1:
            b += 1
        else:
            other += 1
    return a, b, other


def _free_index(v: int) -> int:
    return v + 1


def _confirmed(g: ColoredGraph, candidates, m: int, degree: int = 8, m_imposed: int | None = None):
    """First candidate whose witness really has an obstructing property.

    The rules are phrased for stars made of lines; with exceptional divisors
    around, the h-degree of an isotropic witness drops, so its kind is
    recomputed (and dropped if it exceeds m)."""
    for obs in candidates:
        if obs is None or obs.vector is None:
            continue
        if obs.kind.startswith("isotropic-"):
            free = free_gram(g, degree, m_imposed)
            hx = la.bilinear(list(obs.vector), free, _unit(len(free), [0]))
            if not 1 <= hx <= m:
                continue
            obs = Obstruction(obs.rule, f"isotropic-{hx}", obs.vector)
        if verify(g, obs, degree, m_imposed):
            return obs
    return None


def line_star_obstruction(g: ColoredGraph, e: int, m: int, degree: int = 8):
    """Rules for the star of a line e."""
    return _confirmed(g, _line_star_candidates(g, e, m, degree), m, degree)


def _line_star_candidates(g: ColoredGraph, e: int, m: int, degree: int):
    size = g.n + 1
    st = star(g, e)
    sub = g.induced(st)
    edges = [(st[i], st[j]) for i, j, mult in sub.edges() if mult == 1]
    isolated = [st[c[0]] for c in sub.components() if len(c) == 1]
    a, b, other = star_shape(g, st)
    for u1, u2 in edges:
        yield Obstruction("line star contains A2", "isotropic-3",
                          tuple(_unit(size, [_free_index(u1), _free_index(u2), _free_index(e)])))
    if a >= 8 and m >= 3:
        vs = isolated[:8]
        x = _unit(size, [_free_index(e), 0] + [_free_index(v) for v in vs], [3, -1] + [1] * 8)
        yield Obstruction("line star 8A1", "isotropic-3", tuple(x))
    if b >= 1 and a >= 4 and other == 0 and b == 1:
        comp_edge = edges[0]
        x = _unit(size, [_free_index(e), 0, _free_index(comp_edge[0]), _free_index(comp_edge[1])]
                  + [_free_index(v) for v in isolated[:4]], [2, -1, 1, 1] + [1] * 4)
        yield Obstruction("line star A2+4A1", "separating", tuple(x))
    if b >= 2 and other == 0:
        (u1, u2), (u3, u4) = edges[:2]
        x = _unit(size, [0, _free_index(e)] + [_free_index(u) for u in (u1, u2, u3, u4)],
                  [1, -2, -1, -1, -1, -1])
        yield Obstruction("line star 2A2", "isotropic-2", tuple(x))
    if other or a >= 9:
        x = positive_vector(free_gram(g, degree))
        yield Obstruction("line star beyond A2+3A1 / 8A1", "sigma+", x)


def exceptional_star_obstruction(g: ColoredGraph, e: int, degree: int = 8, m: int = 2):
    return _confirmed(g, _exceptional_star_obstruction_candidates(g, e, degree), m, degree)


def _exceptional_star_obstruction_candidates(g, e, degree):
    size = g.n + 1
    st = star(g, e)
    sub = g.induced(st)
    edges = [(st[i], st[j]) for i, j, mult in sub.edges() if mult == 1]
    a, b, other = star_shape(g, st)
    for u1, u2 in edges:
        x = _unit(size, [_free_index(u1), _free_index(u2), _free_index(e)])
        yield Obstruction("exceptional star contains A2", "isotropic-2", tuple(x))
    if a >= 6:
        yield Obstruction("exceptional star 6A1", "sigma+", positive_vector(free_gram(g, degree)))


def isotropic_star_obstruction(g: ColoredGraph, m_imposed: int = 3, degree: int = 8):
    """Star of the distinguished 3-isotropic vector ι of a partitioned graph
    (vertices with part 1 form the star)."""
    return _confirmed(g, _isotropic_star_obstruction_candidates(g, m_imposed, degree), 3, degree, m_imposed)


def _isotropic_star_obstruction_candidates(g, m_imposed, degree):
    size = g.n + 2
    st = [v for v in range(g.n) if g.part[v] == 1]
    sub = g.induced(st)
    edges = [(st[i], st[j]) for i, j, mult in sub.edges() if mult == 1]
    a, b, other = star_shape(g, st)
    isolated = [st[c[0]] for c in sub.components() if len(c) == 1]
    iota = g.n + 1
    if b >= 1 and a >= 1 and other == 0:
        u1, u2 = edges[0]
        # positive on ι, negative on the isolated star vertex
        x = _unit(size, [0, iota, _free_index(u1), _free_index(u2)], [1, -2, -1, -1])
        yield Obstruction("isotropic star A2+A1", "iota-separating", tuple(x))
    if other or b >= 2 or a >= 10:
        yield Obstruction("isotropic star beyond A2 / 9A1", "sigma+",
                          positive_vector(free_gram(g, degree, m_imposed)))


def two_star_obstruction(g: ColoredGraph, v1: int, v2: int, m: int, degree: int = 8):
    return _confirmed(g, _two_star_obstruction_candidates(g, v1, v2, m, degree), m, degree)


def _two_star_obstruction_candidates(g, v1, v2, m, degree):
    size = g.n + 1
    common = sorted(set(star(g, v1)) & set(star(g, v2)))
    k = len(common)
    sub = g.induced(common)
    discrete = not any(True for _ in sub.edges())
    if g.adjacency[v1][v2] == 1:
        for u in common:
            yield Obstruction("common star of adjacent lines", "isotropic-3",
                              tuple(_unit(size, [_free_index(v1), _free_index(v2), _free_index(u)])))
        if k >= 2:
            yield Obstruction("common star of adjacent lines ≥ 2", "sigma+",
                              positive_vector(free_gram(g, degree)))
        return
    if g.adjacency[v1][v2] != 0:
        return
    if k >= 4 or (k >= 2 and not discrete):
        yield Obstruction("common star of disjoint lines", "sigma+", positive_vector(free_gram(g, degree)))
    if k == 3 and m >= 3:
        x = _unit(size, [0] + [_free_index(v) for v in (v1, v2, *common)], [1, -1, -1, -1, -1, -1])
        yield Obstruction("common star 3A1 of disjoint lines", "isotropic-3", tuple(x))


def cycle_obstruction(g: ColoredGraph, cycle, m: int):
    """A cycle with too few lines: the sum of its vertices."""
    lines = sum(1 for v in cycle if g.color[v] == 1)
    need = 4 if m >= 3 else 3
    if lines >= need:
        return None
    x = _unit(g.n + 1, [_free_index(v) for v in cycle])
    sq = la.bilinear(x, free_gram(g, 8), x)
    if sq != 0:
        # chords make the sum positive, but then it is not orthogonal to h
        return _confirmed(g, [Obstruction(f"cycle with {lines} lines", "sigma+",
                                          positive_vector(free_gram(g, 8)))], m)
    return _confirmed(g, [Obstruction(f"cycle with {lines} lines", f"isotropic-{lines}", tuple(x))], m)


def _short_cycles(g: ColoredGraph, max_len: int = 5):
    """Induced-or-not simple cycles of length ≤ max_len, each once."""
    seen = set()
    for s in range(g.n):
        stack = [[s]]
        while stack:
            path = stack.pop()
            for w in g.neighbors(path[-1]):
                if w == s and len(path) >= 3:
                    key = frozenset(path)
                    if key not in seen:
                        seen.add(key)
                        yield list(path)
                elif w > s and w not in path and len(path) < max_len:
                    stack.append(path + [w])


def violates_star_rules(g: ColoredGraph, m: int, new=None, degree: int = 8):
    """First violated local rule involving a vertex of ``new`` (default: all)."""
    new = set(range(g.n) if new is None else new)
    for i, j, mult in g.edges():
        if mult >= 2 and (i in new or j in new) and g.color[i] == g.color[j] == 1:
            x = _unit(g.n + 1, [_free_index(i), _free_index(j)])
            obs = _confirmed(g, [Obstruction("double edge", "isotropic-2", tuple(x))], m, degree)
            if obs:
                return obs
    for v in sorted(new):
        obs = (line_star_obstruction(g, v, m, degree) if g.color[v] == 1
               else exceptional_star_obstruction(g, v, degree, m))
        if obs:
            return obs
    for v in sorted(new):
        for w in range(g.n):
            if w != v and g.color[v] == g.color[w] == 1 and (w not in new or w > v):
                obs = two_star_obstruction(g, v, w, m, degree)
                if obs:
                    return obs
    for cyc in _short_cycles(g):
        if new & set(cyc):
            obs = cycle_obstruction(g, cyc, m)
            if obs:
                return obs
    return None


# ------------------------------------------------------------------ verification

def verify(g: ColoredGraph, obs: Obstruction, degree: int = 8, m_imposed: int | None = None) -> bool:
    """Check that the witness vector has the claimed property."""
    free = free_gram(g, degree, m_imposed)
    x = list(obs.vector) if obs.vector is not None else None
    if x is None:
        return False
    sq = la.bilinear(x, free, x)
    hx = la.bilinear(x, free, _unit(len(free), [0]))
    if obs.kind.startswith("isotropic-"):
        return sq == 0 and hx == int(obs.kind.split("-")[1])
    if obs.kind == "sigma+":
        return sq > 0 and hx == 0
    prods = [la.bilinear(x, free, _unit(len(free), [_free_index(v)])) for v in range(g.n)
             if g.color[v] == 1]
    if sq != -2 or hx != 0:
        return False
    if obs.kind == "separating":
        return any(p > 0 for p in prods) and any(p < 0 for p in prods)
    if obs.kind == "iota-separating":
        xi = la.bilinear(x, free, _unit(len(free), [len(free) - 1]))
        return (xi > 0 and any(p < 0 for p in prods)) or (xi < 0 and any(p > 0 for p in prods))
    return False


def engine_verdict(g: ColoredGraph, m: int, degree: int = 8, m_imposed: int | None = None) -> str:
    """What the lattice machinery reports for the graph: a witness kind,
    "sigma+" or "ok"."""
    try:
        gl = build(g, degree, (), m_imposed)
    except NotHyperbolic:
        return "sigma+"
    res = gl.master(m, extended=False)
    return res.report.witness_kind or "ok"


# ------------------------------------------------------------------ boundary cases

def _center_with_star(shape, center_color: int = 1) -> ColoredGraph:
    """Vertex 0 (the center) joined to a star of ``shape`` = (a, b): a isolated
    vertices and b disjoint edges."""
    a, b = shape
    n = 1 + a + 2 * b
    edges, nxt = [], 1
    for _ in range(b):
        edges += [(0, nxt), (0, nxt + 1), (nxt, nxt + 1)]
        nxt += 2
    for _ in range(a):
        edges.append((0, nxt))
        nxt += 1
    return ColoredGraph.from_edges(n, edges, [center_color] + [1] * (n - 1))


def _iso_star(shape) -> ColoredGraph:
    a, b = shape
    n = a + 2 * b
    edges = [(2 * i, 2 * i + 1) for i in range(b)]
    return ColoredGraph.from_edges(n, edges, [1] * n, part=[1] * n)


@dataclass
class BoundaryCase:
    name: str
    graph: ColoredGraph
    m: int
    expected: str
    obstruction: Obstruction | None
    m_imposed: int | None = None

    def engine(self) -> str:
        return engine_verdict(self.graph, self.m, m_imposed=self.m_imposed)

    def witness_ok(self) -> bool:
        return self.obstruction is not None and verify(self.graph, self.obstruction, m_imposed=self.m_imposed)

    @property
    def ok(self) -> bool:
        return (self.obstruction is not None and self.obstruction.kind == self.expected
                and self.witness_ok() and self.engine() == self.expected)


def boundary_cases() -> list:
    cases = []

    def add(name, g, m, expected, obs, m_imposed=None):
        cases.append(BoundaryCase(name, g, m, expected, obs, m_imposed))

    g = _center_with_star((0, 1))
    add("line star A2", g, 3, "isotropic-3", line_star_obstruction(g, 0, 3))
    g = _center_with_star((8, 0))
    add("line star 8A1", g, 3, "isotropic-3", line_star_obstruction(g, 0, 3))
    g = _center_with_star((4, 1))
    add("line star A2+4A1", g, 2, "separating", line_star_obstruction(g, 0, 2))
    g = _center_with_star((9, 0))
    add("line star 9A1", g, 2, "sigma+", line_star_obstruction(g, 0, 2))
    g = _center_with_star((0, 2))
    add("line star 2A2", g, 2, "isotropic-2", line_star_obstruction(g, 0, 2))
    g = ColoredGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)])
    add("line star A3", g, 2, "sigma+", line_star_obstruction(g, 0, 2))
    g = ColoredGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)])
    add("line star ~A2", g, 2, "sigma+", line_star_obstruction(g, 0, 2))
    g = _center_with_star((0, 1), center_color=0)
    add("exceptional star A2", g, 2, "isotropic-2", exceptional_star_obstruction(g, 0))
    g = _center_with_star((6, 0), center_color=0)
    add("exceptional star 6A1", g, 2, "sigma+", exceptional_star_obstruction(g, 0))
    g = _iso_star((1, 1))
    add("3-isotropic star A2+A1", g, 3, "iota-separating", isotropic_star_obstruction(g), 3)
    g = _iso_star((10, 0))
    add("3-isotropic star 10A1", g, 3, "sigma+", isotropic_star_obstruction(g), 3)
    # two lines and their common star
    g = ColoredGraph.from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
    add("disjoint lines, common star 3A1", g, 3, "isotropic-3", two_star_obstruction(g, 0, 1, 3))
    g = ColoredGraph.from_edges(6, [(0, k) for k in range(2, 6)] + [(1, k) for k in range(2, 6)])
    add("disjoint lines, common star 4A1", g, 2, "sigma+", two_star_obstruction(g, 0, 1, 2))
    g = ColoredGraph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    add("disjoint lines, common star A2", g, 2, "sigma+", two_star_obstruction(g, 0, 1, 2))
    g = ColoredGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    add("adjacent lines, common neighbour", g, 3, "isotropic-3", two_star_obstruction(g, 0, 1, 3))
    # cycles
    g = ColoredGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)], [1, 1, 0])
    add("triangle with an exceptional divisor", g, 2, "isotropic-2", cycle_obstruction(g, [0, 1, 2], 2))
    g = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [1, 0, 1, 0])
    add("quadrangle with two exceptional divisors", g, 2, "isotropic-2",
        cycle_obstruction(g, [0, 1, 2, 3], 2))
    g = ColoredGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], [1, 1, 1, 0, 0])
    add("pentagon with three lines", g, 3, "isotropic-3", cycle_obstruction(g, list(range(5)), 3))
    g = ColoredGraph.from_edges(2, [(0, 1, 2)])
    add("double edge", g, 2, "isotropic-2", violates_star_rules(g, 2))
    return cases
