"""Lattices spanned by graphs, their kernels, geometricity and saturation.

Free coordinates of a graph lattice are ordered ``[h, v_0, …, v_{n-1}, ι]``
(ι only for partitioned graphs).  Kernel vectors are rational vectors in these
free coordinates unless stated otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg as la
from .admissibility import MasterResult, master_test
from .genus import even_lattice_exists
from .graph import ColoredGraph
from .lattice import (DiscriminantGroup, Extension, IntLattice, Kernel, LatticeError,
                      PolarizedLattice, extend_by_kernel, primitive_hull, radical_quotient)


class NotHyperbolic(LatticeError):
    pass


def free_gram(graph: ColoredGraph, degree: int, m: int | None = None) -> list:
    n = graph.n
    size = n + 1 + (1 if m is not None else 0)
    g = [[0] * size for _ in range(size)]
    g[0][0] = degree
    for i in range(n):
        g[0][i + 1] = g[i + 1][0] = graph.color[i]
        g[i + 1][i + 1] = -2
        for j in range(i):
            g[i + 1][j + 1] = g[j + 1][i + 1] = graph.adjacency[i][j]
    if m is not None:
        k = n + 1
        g[0][k] = g[k][0] = m
        for i in range(n):
            g[i + 1][k] = g[k][i + 1] = graph.part[i] if graph.part is not None else 0
    return g


@dataclass
class GraphLattice:
    source: ColoredGraph
    degree: int
    m_imposed: int | None
    free: list                     # free Gram matrix
    base: IntLattice               # (Z·generators)/ker
    projection: list               # row i: base coordinates of free generator i
    extension: Extension           # S as an overlattice of base
    kernel: tuple                  # kernel vectors in free coordinates
    base_basis: list = None        # base basis in free coordinates

    @cached_property
    def lattice(self) -> PolarizedLattice:
        return PolarizedLattice(self.extension.lattice, self.to_lattice(self._unit(0)))

    def _unit(self, i):
        e = [0] * len(self.free)
        e[i] = 1
        return e

    def free_to_base(self, z) -> tuple:
        return tuple(la.normalize(x) for x in la.vecmat(z, self.projection))

    def to_lattice(self, z) -> tuple:
        """Free coordinates → coordinates in the basis of S."""
        return self.extension.coords(self.free_to_base(z))

    @cached_property
    def vertex_map(self) -> list:
        return [self.to_lattice(self._unit(i + 1)) for i in range(self.source.n)]

    @cached_property
    def iota(self):
        if self.m_imposed is None:
            return None
        return self.to_lattice(self._unit(self.source.n + 1))

    @property
    def h(self) -> tuple:
        return self.lattice.h

    @property
    def lines(self) -> list:
        return [self.vertex_map[v] for v in self.source.lines()]

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def det(self) -> int:
        return self.extension.lattice.det

    def master(self, m: int, **kw) -> MasterResult:
        iso_m = m if self.m_imposed is None else min(m, self.m_imposed - 1)
        return master_test(self.lattice, self.lines, iso_m, self.iota, **kw)


def build(graph: ColoredGraph, degree: int, kernel=(), m_imposed: int | None = None,
          check_hyperbolic: bool = True) -> GraphLattice:
    """Fano lattice of a (bi-colored or partitioned) graph, extended by the
    kernel vectors given in free coordinates."""
    free = free_gram(graph, degree, m_imposed)
    if la.det(free) == 0:
        base, ebasis, proj = radical_quotient(free)
    else:
        base, ebasis, proj = IntLattice(free), la.identity(len(free)), la.identity(len(free))
    if check_hyperbolic:
        sp = base.signature[0]
        if sp != 1:
            raise NotHyperbolic(f"σ+ = {sp}")
    kernel = tuple(tuple(k) for k in kernel)
    base_k = [la.vecmat(k, proj) for k in kernel]
    ext = extend_by_kernel(base, Kernel(tuple(base_k)))
    return GraphLattice(graph, degree, m_imposed, free, base, proj, ext, kernel, ebasis)


# ---------------------------------------------------------------- geometricity

@dataclass(frozen=True)
class GeometricVerdict:
    embeds: bool
    detail: str
    rank: int
    length: int


def nikulin_embeds(S: PolarizedLattice | IntLattice) -> GeometricVerdict:
    """Does S embed primitively into the even unimodular lattice of signature
    (3, 19)?  Decided through the existence of an orthogonal complement."""
    lat = S.lattice if isinstance(S, PolarizedLattice) else S
    r = lat.rank
    sp, sm, s0 = lat.signature
    if s0:
        return GeometricVerdict(False, "degenerate", r, 0)
    if r > 22 or sp > 3 or sm > 19:
        return GeometricVerdict(False, "signature does not fit into (3, 19)", r, 0)
    disc = lat.discriminant
    ell = disc.length
    tp, tm = 3 - sp, 19 - sm
    if r <= 20 - ell - 2 and tp >= 0 and tm >= 0:
        return GeometricVerdict(True, "rank + length small enough", r, ell)
    v = even_lattice_exists(tp, tm, lat, negate=True)
    return GeometricVerdict(v.exists, v.reason, r, ell)


# ------------------------------------------------------------ forms and kernels

def forms_isomorphic(a: DiscriminantGroup, b: DiscriminantGroup, negate_b: bool = False) -> bool:
    """Brute-force isometry test of two (small) discriminant forms."""
    if a.order != b.order:
        return False
    sgn = -1 if negate_b else 1
    belems = list(b.elements())
    k = len(a.orders)
    gens = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    qa = [a.q(g) for g in gens]
    bq = {e: (sgn * b.q(e)) % 2 for e in belems}
    cands = []
    for g, d, q in zip(gens, a.orders, qa):
        cands.append([e for e in belems if b.element_order(e) == d and bq[e] == q])
    bab = [[a.b(gens[i], gens[j]) for j in range(k)] for i in range(k)]

    def rec(i, imgs):
        if i == k:
            return len(b.span(imgs)) == a.order
        for e in cands[i]:
            if all((bab[i][j] - sgn * b.b(e, imgs[j])) % 1 == 0 for j in range(i)):
                if rec(i + 1, imgs + [e]):
                    return True
        return False

    return rec(0, [])


def reduced_even_binary_forms(det: int) -> list:
    """[a, b, c] with 0 ≤ 2b ≤ a ≤ c, a, c even, ac − b² = det."""
    out = []
    a = 2
    while 3 * a * a <= 4 * det:
        for b in range(0, a // 2 + 1):
            num = det + b * b
            if num % a == 0:
                c = num // a
                if c >= a and c % 2 == 0:
                    out.append([a, b, c])
        a += 2
    return out


def transcendental_candidates(S: PolarizedLattice | IntLattice) -> list:
    lat = S.lattice if isinstance(S, PolarizedLattice) else S
    if lat.rank != 20:
        raise ValueError("transcendental candidates need rank 20")
    d = abs(lat.det)
    out = []
    for a, b, c in reduced_even_binary_forms(d):
        t = IntLattice([[a, b], [b, c]])
        if forms_isomorphic(t.discriminant, lat.discriminant, negate_b=True):
            out.append([a, b, c])
    return out


def restrict(gl: GraphLattice, vertices) -> Extension:
    """Primitive hull of h and the given vertices inside S."""
    gens = [gl.h] + [gl.vertex_map[v] for v in vertices]
    return primitive_hull(gl.lattice.lattice, gens)


# ------------------------------------------------------------ geometric kernels

def vertex_action(gl: GraphLattice, perm) -> list:
    """Matrix (rows) of the isometry of S ⊗ Q induced by a vertex permutation
    fixing h (and ι)."""
    nfree = len(gl.free)
    n = gl.source.n
    full = list(range(nfree))
    for v in range(n):
        full[v + 1] = perm[v] + 1
    rows = []
    for e in gl.base_basis:
        z = [0] * nfree
        for i, x in enumerate(e):
            z[full[i]] += x
        rows.append(la.vecmat(z, gl.projection))
    ext = gl.extension
    b = [list(r) for r in ext.basis]
    binv = ext._inv
    return [[la.normalize(x) for x in row] for row in la.matmul(la.matmul(b, rows), binv)]


@dataclass
class KernelSearch:
    """Prime-order isotropic extension tree above a starting lattice."""

    gl: GraphLattice
    m: int
    symmetry: tuple = ()
    limit: int | None = None
    results: list = field(default_factory=list)
    visited: set = field(default_factory=set)
    failed: list = field(default_factory=list)
    steps: int = 0

    def __post_init__(self):
        self.S0 = self.gl.lattice
        self.D0 = self.S0.lattice.discriminant
        self.gamma = self.gl.lines
        self.iota = self.gl.iota
        self.actions = [vertex_action(self.gl, p) for p in self.symmetry]

    def master(self, ext: Extension):
        S = PolarizedLattice(ext.lattice, ext.coords(self.S0.h))
        gamma = [ext.coords(g) for g in self.gamma]
        iota = ext.coords(self.iota) if self.iota is not None else None
        iso_m = self.m if self.gl.m_imposed is None else min(self.m, self.gl.m_imposed - 1)
        return S, master_test(S, gamma, iso_m, iota, extended=False)

    def extension_of(self, group) -> Extension:
        gens = [self.D0.lift(e) for e in sorted(group) if any(e)]
        return extend_by_kernel(self.S0.lattice, Kernel(tuple(gens)), check=False)

    def act(self, mat, e) -> tuple:
        v = la.vecmat(self.D0.lift(e), mat)
        return self.D0.element(v)

    def orbit_reps(self, subgroups) -> list:
        """One subgroup (frozenset) per orbit of the symmetry group."""
        if not self.actions:
            return list(subgroups)
        pool = set(subgroups)
        reps = []
        for s in subgroups:
            if s not in pool:
                continue
            reps.append(s)
            frontier = [s]
            pool.discard(s)
            while frontier:
                nxt = []
                for t in frontier:
                    for mat in self.actions:
                        img = frozenset(self.act(mat, e) for e in t)
                        if img in pool:
                            pool.discard(img)
                            nxt.append(img)
                frontier = nxt
        return reps

    def run(self, first_only: bool = False):
        self.first_only = first_only
        self.explore(frozenset([self.D0.zero()]), top=True)
        return self.results

    def explore(self, group: frozenset, top: bool = False):
        if group in self.visited:
            return
        if self.first_only and self.results:
            return
        self.visited.add(group)
        if any(f <= group for f in self.failed):
            return
        self.steps += 1
        ext = self.extension_of(group)
        S, res = self.master(ext)
        if not res.ok:
            self.failed.append(group)
            return
        if nikulin_embeds(S).embeds:
            self.results.append((group, ext, S, res))
            if self.first_only:
                return
        D = S.lattice.discriminant
        children = []
        for p in D.primes():
            for x in D.prime_order_subgroups(p):
                if D.q(x) != 0:
                    continue
                y = self.D0.element(ext.old(D.lift(x)))
                children.append(frozenset(self.D0.span(list(group) + [y])))
        children = sorted(set(children), key=lambda s: (len(s), sorted(s)))
        if top:
            children = self.orbit_reps(children)
        for c in children:
            self.explore(c)

    def same_orbit_reduce(self, groups) -> list:
        return self.orbit_reps(groups)


@dataclass
class KernelResult:
    kernel: tuple          # kernel vectors in free coordinates (base kernel included)
    group: frozenset       # subgroup of discr of the starting lattice
    lattice: PolarizedLattice
    master: MasterResult

    @property
    def det(self) -> int:
        return self.lattice.lattice.det


def _free_preimage(gl: GraphLattice, v_lattice) -> tuple:
    """A free-coordinate vector mapping to a given vector of S ⊗ Q."""
    base_v = gl.extension.old(v_lattice)
    return tuple(la.normalize(x) for x in la.vecmat(base_v, gl.base_basis))


def geometric_kernels(graph: ColoredGraph, degree: int, m: int, base=(), symmetry=(),
                      m_imposed: int | None = None, first_only: bool = False,
                      reduce: bool = True) -> list[KernelResult]:
    """All kernels K ⊇ base (up to the symmetry group) such that the extended
    graph lattice is m-admissible, extensible and geometric."""
    gl = build(graph, degree, base, m_imposed)
    search = KernelSearch(gl, m, tuple(symmetry))
    found = search.run(first_only)
    groups = [g for g, *_ in found]
    if reduce and search.actions:
        keep = set(search.orbit_reps(sorted(groups, key=lambda s: (len(s), sorted(s)))))
    else:
        keep = set(groups)
    out = []
    for group, ext, S, res in found:
        if group not in keep:
            continue
        extra = [_free_preimage(gl, search.D0.lift(e)) for e in sorted(group) if any(e)]
        out.append(KernelResult(tuple(gl.kernel) + tuple(extra), group, S, res))
    out.sort(key=lambda r: (len(r.group), sorted(r.group)))
    return out


@dataclass
class Saturation:
    plain: ColoredGraph
    extended: ColoredGraph
    lattice: PolarizedLattice
    kernel: tuple

    @property
    def line_count(self) -> int:
        return self.plain.n

    @property
    def exceptional_count(self) -> int:
        return sum(1 for c in self.extended.color if c == 0)


def saturate(graph: ColoredGraph, degree: int, kernel=(), m: int = 3,
             m_imposed: int | None = None) -> Saturation:
    gl = build(graph, degree, kernel, m_imposed)
    res = gl.master(m)
    if not res.ok:
        raise LatticeError(f"not admissible: {res.report.describe()}")
    return Saturation(res.graph, res.extended, gl.lattice, tuple(kernel))


def saturation_list(graph: ColoredGraph, degree: int, m: int, base=(), symmetry=(),
                    m_imposed: int | None = None) -> list[Saturation]:
    """Saturations over all geometric kernels containing ``base``."""
    out = []
    for kr in geometric_kernels(graph, degree, m, base, symmetry, m_imposed):
        out.append(saturate(graph, degree, kr.kernel, m, m_imposed))
    return out
