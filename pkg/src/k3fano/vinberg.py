"""Roots of polarized lattices, Weyl chambers and Fano graphs.

Roots and isotropic vectors of a given h-degree are found by enumerating
short vectors of the orthogonal complement of h, rescaled by −h² so that it
becomes positive definite.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg as la
from .graph import ColoredGraph
from .lattice import IntLattice, PolarizedLattice, short_vectors

DEFAULT_SEED = 20180521


class ProjectionLattice:
    """h⊥ ⊗ Q ∩ (projection of S), with the form multiplied by −h²."""

    def __init__(self, S: PolarizedLattice):
        self.S = S
        n = S.rank
        two_d = S.degree
        hcov = S.lattice.covector(S.h)
        gens = []
        for k in range(n):
            row = [Fraction(-hcov[k] * x, two_d) for x in S.h]
            row[k] += 1
            gens.append(row)
        self.basis = la.row_lattice_basis(gens)
        self.den = la.denominator_lcm(self.basis)
        self.int_basis = [[int(x * self.den) for x in row] for row in self.basis]
        g = la.congruent(self.basis, [list(r) for r in S.gram])
        self.gram = [[int(-two_d * x) for x in row] for row in g]
        self._cache = {}

    def vectors(self, bound: int) -> list:
        """(den · S-coordinates as integers, scaled norm) for all projection
        vectors up to ``bound``, one per ± pair, in enumeration order."""
        best = max(self._cache, default=None)
        if best is not None and best >= bound:
            return [(v, nm) for v, nm in self._cache[best] if nm <= bound]
        raw = short_vectors(self.gram, bound) if self.gram else []
        cols = list(zip(*self.int_basis))
        out = [(tuple(sum(a * b for a, b in zip(y, c) if a) for c in cols), nm) for y, nm in raw]
        self._cache = {bound: out}
        return out


def _sign_normalize(v) -> tuple:
    first = next((c for c in v if c), 0)
    return tuple(-c for c in v) if first < 0 else tuple(v)


class RootSet:
    """Roots (r² = −2) and isotropic vectors of the small h-degrees of S."""

    def __init__(self, S: PolarizedLattice, max_level: int = 1, iso_levels=(1, 2, 3)):
        self.S = S
        self.degree = S.degree
        self.proj = ProjectionLattice(S)
        iso_levels = tuple(iso_levels)
        bound = 2 * self.degree + max_level ** 2
        if iso_levels:
            bound = max(bound, max(iso_levels) ** 2)
        self.bound = bound
        self._vecs = self.proj.vectors(bound)
        self.by_level = {}
        for n in range(max_level + 1):
            self.by_level[n] = self._lift(2 * self.degree + n * n, n)
        self.isotropic = {m: self._lift(m * m, m) for m in iso_levels}

    def _lift(self, norm: int, level: int) -> list:
        # r = ±v + (level / 2d) h, with v = w / den
        den, deg = self.proj.den, self.degree
        q = den * deg
        hs = [level * den * x for x in self.S.h]
        out, seen = [], set()
        for w, nm in self._vecs:
            if nm != norm:
                continue
            signs = (1,) if level == 0 else (1, -1)
            for s in signs:
                num = [s * deg * a + b for a, b in zip(w, hs)]
                if all(x % q == 0 for x in num):
                    r = tuple(x // q for x in num)
                    if level == 0:
                        r = _sign_normalize(r)
                    if r not in seen:
                        seen.add(r)
                        out.append(r)
        return out

    @property
    def roots0(self) -> list:
        """Level-0 roots, one per ± pair."""
        return self.by_level[0]

    @property
    def lines(self) -> list:
        return self.by_level.get(1, [])


# ----------------------------------------------------------------- chambers

@dataclass
class WeylChamber:
    walls: list
    positive: list
    functional: tuple | None = None

    @cached_property
    def positive_set(self) -> frozenset:
        return frozenset(self.positive)


@dataclass
class SeparatingRoot:
    root: tuple
    u: int            # index in Γ with root·u > 0 (or −1 for ι)
    v: int            # index in Γ with root·v < 0
    kind: str = "separating"


def default_functional(S: PolarizedLattice, seed: int = DEFAULT_SEED) -> tuple:
    rng = random.Random(seed)
    return tuple(rng.randint(-10 ** 6, 10 ** 6) for _ in range(S.rank))


def _simple_roots(positive: list) -> list:
    pos = set(positive)
    walls = []
    for r in positive:
        dec = False
        for p in positive:
            if p is r:
                continue
            if tuple(a - b for a, b in zip(r, p)) in pos:
                dec = True
                break
        if not dec:
            walls.append(r)
    return walls


def weyl_chamber_from_functional(S: PolarizedLattice, roots, functional=None) -> WeylChamber:
    """Chamber {r : ℓ(r) > 0} for the root set ``roots`` (one per ± pair)."""
    roots = list(roots)
    c = list(functional) if functional is not None else list(default_functional(S))
    gram = S.gram
    while True:
        bad = next((r for r in roots if la.dot(c, r) == 0), None)
        if bad is None:
            break
        rc = la.vecmat(bad, gram)
        c = [2 * x - y for x, y in zip(c, rc)]
    positive = []
    for r in roots:
        positive.append(r if la.dot(c, r) > 0 else tuple(-x for x in r))
    positive.sort()
    walls = sorted(_simple_roots(positive))
    return WeylChamber(walls, positive, tuple(c))


def find_separating_root(S: PolarizedLattice, roots0, gamma, iota=None):
    """First root r with r·u > 0 > r·v for u, v ∈ Γ (or r·ι > 0 > r·v)."""
    gram = S.gram
    covs = [la.vecmat(g, gram) for g in gamma]
    icov = la.vecmat(iota, gram) if iota is not None else None
    for r in roots0:
        prods = [la.dot(c, r) for c in covs]
        pos = next((i for i, x in enumerate(prods) if x > 0), None)
        neg = next((i for i, x in enumerate(prods) if x < 0), None)
        if pos is not None and neg is not None:
            return SeparatingRoot(tuple(r), pos, neg)
        if icov is not None:
            ri = la.dot(icov, r)
            if ri > 0 and neg is not None:
                return SeparatingRoot(tuple(r), -1, neg, "iota-separating")
            if ri < 0 and pos is not None:
                return SeparatingRoot(tuple(-x for x in r), -1, pos, "iota-separating")
    return None


def compatible_chamber(S: PolarizedLattice, gamma, roots: RootSet | None = None,
                       iota=None, functional=None):
    """The unique Weyl chamber whose closure contains Γ (and ι), built by
    Vinberg's algorithm from a chamber of (Zh + ZΓ)⊥; or a separating root."""
    if roots is None:
        roots = RootSet(S)
    gram = S.gram
    roots0 = roots.roots0
    witness = find_separating_root(S, roots0, gamma, iota)
    if witness is not None:
        return witness
    lstar = [0] * S.rank
    for g in list(gamma) + ([iota] if iota is not None else []):
        lstar = [a + b for a, b in zip(lstar, g)]
    lcov = la.vecmat(lstar, gram)
    inner, outer = [], []
    for r in roots0:
        x = la.dot(lcov, r)
        if x == 0:
            inner.append(r)
        else:
            outer.append((x, r) if x > 0 else (-x, tuple(-a for a in r)))
    w0 = weyl_chamber_from_functional(S, inner, functional)
    walls = list(w0.walls)
    target = la.rank([list(r) for r in roots0]) if roots0 else 0
    outer.sort()
    covs = [la.vecmat(w, gram) for w in walls]
    i = 0
    while i < len(outer) and len(walls) < target:
        level = outer[i][0]
        batch = []
        while i < len(outer) and outer[i][0] == level:
            batch.append(outer[i][1])
            i += 1
        new = [e for e in batch if all(la.dot(c, e) >= 0 for c in covs)]
        walls.extend(new)
        covs.extend(la.vecmat(e, gram) for e in new)
    positive = sorted(w0.positive + [r for _, r in outer])
    return WeylChamber(sorted(walls), positive, w0.functional)


# --------------------------------------------------------------- Fano graphs

@dataclass
class FundPolyhedron:
    chamber: WeylChamber
    levels: dict = field(default_factory=dict)   # n ↦ walls of h-degree n

    @property
    def walls(self) -> list:
        return [w for n in sorted(self.levels) for w in self.levels[n]]


def vinberg_extend(S: PolarizedLattice, chamber: WeylChamber, roots: RootSet | None = None,
                   max_level: int = 1) -> FundPolyhedron:
    """Walls of the fundamental polyhedron up to h-degree ``max_level``."""
    if roots is None or max(roots.by_level) < max_level:
        roots = RootSet(S, max_level=max_level)
    gram = S.gram
    levels = {0: list(chamber.walls)}
    covs = [la.vecmat(w, gram) for w in chamber.walls]
    for n in range(1, max_level + 1):
        cands = sorted(roots.by_level[n])
        new = [r for r in cands if all(la.dot(c, r) >= 0 for c in covs)]
        levels[n] = new
        covs.extend(la.vecmat(r, gram) for r in new)
    return FundPolyhedron(chamber, levels)


def graph_of_vectors(S: PolarizedLattice, vectors, iota=None) -> ColoredGraph:
    gram = S.gram
    covs = [la.vecmat(v, gram) for v in vectors]
    n = len(vectors)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            adj[i][j] = adj[j][i] = la.dot(covs[i], vectors[j])
    hcov = la.vecmat(S.h, gram)
    color = [la.dot(hcov, v) for v in vectors]
    part = [la.dot(la.vecmat(iota, gram), v) for v in vectors] if iota is not None else None
    return ColoredGraph(adj, color, part, tuple(tuple(v) for v in vectors))


def fano_lines(S: PolarizedLattice, chamber: WeylChamber, roots: RootSet | None = None) -> list:
    if roots is None:
        roots = RootSet(S)
    gram = S.gram
    covs = [la.vecmat(w, gram) for w in chamber.walls]
    return sorted(l for l in roots.lines if all(la.dot(c, l) >= 0 for c in covs))


def fano_graph(S: PolarizedLattice, chamber: WeylChamber, extended: bool = False,
               roots: RootSet | None = None, iota=None, first=()) -> ColoredGraph:
    """Plain (lines) or extended (lines and chamber walls) Fano graph.

    Vertices listed in ``first`` come first, the rest in lexicographic order.
    """
    lines = fano_lines(S, chamber, roots)
    verts = list(lines) + (sorted(chamber.walls) if extended else [])
    first = [tuple(v) for v in first]
    rest = sorted(set(verts) - set(first))
    missing = [v for v in first if v not in set(verts)]
    if missing:
        raise ValueError("requested vertices are not walls of the chamber")
    return graph_of_vectors(S, first + rest, iota)
