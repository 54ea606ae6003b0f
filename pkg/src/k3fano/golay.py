"""The extended binary Golay code and the sixteen-line (Kummer) kernels.

Subsets of the 16-point set ``fo`` are 16-bit masks; bit i is the i-th point
of fo in increasing order of its position among the 24 code coordinates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .canon import canonicalize, group_order
from .fanolattice import geometric_kernels, transcendental_candidates
from .graph import ColoredGraph
from .search import BaseData, Extender, PseudoVertex, Symmetry

# generator polynomial of the length-23 cyclic (quadratic residue) Golay code
GENERATOR_EXPONENTS = (0, 2, 4, 5, 6, 10, 11)
FULL = (1 << 24) - 1


def popcount(x: int) -> int:
    return bin(x).count("1")


def golay_code() -> list:
    """All 4096 codewords as 24-bit masks (bit 23 is the parity bit)."""
    g = sum(1 << e for e in GENERATOR_EXPONENTS)
    basis = []
    for s in range(12):
        w = g << s
        basis.append(w | (popcount(w) % 2) << 23)
    code = [0]
    for b in basis:
        code += [c ^ b for c in code]
    return sorted(code)


def weight_enumerator(code) -> dict:
    out = {}
    for c in code:
        w = popcount(c)
        out[w] = out.get(w, 0) + 1
    return dict(sorted(out.items()))


def members(mask: int) -> list:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass
class GolayContext:
    code: tuple
    fo24: int                       # the weight-16 word, as a 24-bit mask
    positions: tuple                # code coordinates of the 16 points
    C: tuple                        # codewords inside fo (16-bit masks)
    S: dict                         # n ↦ sorted list of 16-bit masks
    classes: list                   # list of sorted tuples of masks
    class_of: dict                  # mask ↦ class index
    _aut: tuple | None = field(default=None, repr=False)

    ALL = (1 << 16) - 1

    def bar(self, s: int) -> int:
        return self.ALL ^ s

    @property
    def octads(self) -> list:
        return [c for c in self.C if popcount(c) == 8]

    def similar(self, r: int, s: int) -> bool:
        return (r ^ s) in self._Cset

    @cached_property
    def _Cset(self) -> frozenset:
        return frozenset(self.C)

    def even_set(self, s: int) -> bool:
        """|s ∩ o| even for every o ∈ C."""
        return all(popcount(s & o) % 2 == 0 for o in self.C)

    def in_S_or_C(self, s: int) -> bool:
        return s in self._Cset or s in self._Sset

    @cached_property
    def _Sset(self) -> frozenset:
        return frozenset(x for v in self.S.values() for x in v)

    def S_n(self, n: int, o: int, m: int) -> list:
        return [s for s in self.S.get(n, []) if popcount(s & o) % 2 == m % 2]

    def eclass(self, o: int, n: int | None = None) -> list:
        cl = self.classes[self.class_of[o]]
        return [s for s in cl if n is None or popcount(s) == n]

    def coarse_class(self, e: int, o: int) -> list:
        """r ≈ s iff r ∼ s or r ∼ s △ o, restricted to the length of e."""
        n = popcount(e)
        out = set(self.eclass(e, n))
        t = e ^ o
        if t in self.class_of:
            out |= {s for s in self.eclass(t) if popcount(s) == n}
        return sorted(out)

    # ----------------------------------------------------------- symmetry

    def incidence_graph(self, extra=()) -> ColoredGraph:
        """Points (color 1), octads of C (color 0), and extra subsets with
        increasing colors 2, 3, … per group."""
        blocks = [(o, 0) for o in self.octads]
        for k, group in enumerate(extra):
            blocks += [(s, 2 + k) for s in group]
        n = 16 + len(blocks)
        edges = [(i, 16 + k) for k, (b, _) in enumerate(blocks) for i in members(b)]
        return ColoredGraph.from_edges(n, edges, [1] * 16 + [c for _, c in blocks])

    def _point_generators(self, extra=()) -> tuple:
        cf = canonicalize(self.incidence_graph(extra))
        return tuple(tuple(g[:16]) for g in cf.generators)

    def aut_generators(self) -> tuple:
        if self._aut is None:
            self._aut = self._point_generators()
        return self._aut

    def aut_order(self) -> int:
        return group_order(self.aut_generators(), 16)

    def class_stabilizer(self, o: int) -> tuple:
        """Generators of the stabilizer of the class [o] in Aut C."""
        return self._point_generators([self.eclass(o)])

    @staticmethod
    def act(perm, s: int) -> int:
        out = 0
        for i in members(s):
            out |= 1 << perm[i]
        return out

    def orbits(self, generators, sets) -> list:
        pool = set(sets)
        out = []
        for s in sorted(sets):
            if s not in pool:
                continue
            orb = {s}
            frontier = [s]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in generators:
                        y = self.act(g, x)
                        if y not in orb:
                            orb.add(y)
                            nxt.append(y)
                frontier = nxt
            pool -= orb
            out.append(sorted(orb))
        return out

    # ----------------------------------------------------------- kernels

    def C_basis(self) -> list:
        basis = []
        span = {0}
        for c in self.C:
            if c not in span:
                basis.append(c)
                span |= {x ^ c for x in span}
        return basis

    def kernel_fo(self, points: int | None = None) -> list:
        """½[o] for a basis of the words of C inside ``points`` (default fo),
        as free coordinates (h, l_0, …, l_15) restricted to ``points``."""
        points = self.ALL if points is None else points
        idx = members(points)
        words = [c for c in self.C if c & ~points == 0]
        basis, span = [], {0}
        for c in words:
            if c not in span:
                basis.append(c)
                span |= {x ^ c for x in span}
        return [tuple([Fraction(0)] + [Fraction(1, 2) if c >> i & 1 else Fraction(0) for i in idx])
                for c in basis]

    def kernel_64(self, o: int) -> list:
        """K_fo plus ¼h + ⅛[fo] + ½[o], o ∈ S6."""
        if popcount(o) != 6 or o not in self._Sset:
            raise ValueError("o must lie in S6")
        v = [Fraction(1, 4)] + [Fraction(1, 8) + (Fraction(1, 2) if o >> i & 1 else 0) for i in range(16)]
        return self.kernel_fo() + [tuple(v)]

    def kernel_256(self, o: int) -> list:
        """K_fo plus ½h + ¼[fo] + ½[o], o ∈ S8."""
        if popcount(o) != 8 or o not in self._Sset:
            raise ValueError("o must lie in S8")
        v = [Fraction(1, 2)] + [Fraction(1, 4) + (Fraction(1, 2) if o >> i & 1 else 0) for i in range(16)]
        return self.kernel_fo() + [tuple(v)]

    def kernel_star(self, star: int) -> list:
        return self.kernel_fo(self.ALL ^ star)


def build_golay() -> GolayContext:
    code = golay_code()
    octad = min(c for c in code if popcount(c) == 8)
    fo24 = FULL ^ octad
    positions = tuple(i for i in range(24) if fo24 >> i & 1)

    def project(c):
        return sum(1 << k for k, i in enumerate(positions) if c >> i & 1)

    C = sorted({project(c) for c in code if c & ~fo24 == 0})
    Cset = set(C)
    traces = {project(c & fo24) for c in code}
    S = {}
    for s in sorted(traces - Cset):
        S.setdefault(popcount(s), []).append(s)
    classes, class_of = [], {}
    for s in sorted(traces - Cset):
        if s in class_of:
            continue
        cl = sorted(s ^ c for c in C)
        for x in cl:
            class_of[x] = len(classes)
        classes.append(tuple(cl))
    return GolayContext(tuple(code), fo24, positions, tuple(C), S, classes, class_of)


def class_profile(ctx: GolayContext) -> dict:
    """{frozenset of member lengths: [(sizes per length) …]} summary used for
    the class-count checks."""
    prof = {}
    for cl in ctx.classes:
        sizes = {}
        for s in cl:
            sizes[popcount(s)] = sizes.get(popcount(s), 0) + 1
        key = tuple(sorted(sizes.items()))
        prof[key] = prof.get(key, 0) + 1
    return prof


def fo_graph(points: int = (1 << 16) - 1) -> ColoredGraph:
    n = popcount(points)
    return ColoredGraph.from_edges(n, [])


# ------------------------------------------------------------------ pipelines

STAR_LIMIT = {"line": 8, "exceptional": 5, "isotropic": 9}


def subsets_upto(n: int, k: int):
    for size in range(k + 1):
        for c in itertools.combinations(range(n), size):
            yield c


def candidates(base, kind: str, n: int = 16, strict: bool = True, m: int = 3, limit=None) -> list:
    """Pseudo-vertices over the first ``n`` base vertices passing the
    Sylvester and kernel tests (support sizes capped by the local star bounds)."""
    limit = STAR_LIMIT[kind] if limit is None else limit
    make = {"line": PseudoVertex.line, "exceptional": PseudoVertex.exceptional,
            "isotropic": lambda s: PseudoVertex.isotropic(s, m)}[kind]
    return [v for v in (make(s) for s in subsets_upto(n, limit)) if base.admits(v, strict=strict)]


def mask_of(support) -> int:
    return sum(1 << i for i in support)


@dataclass
class KummerReport:
    variant: str
    kernel_dets: list = field(default_factory=list)
    saturations: list = field(default_factory=list)        # Saturation objects
    survivor_counts: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def rows(self) -> list:
        out = []
        for s in self.saturations:
            row = {"lines": s.line_count, "exceptional": s.exceptional_count,
                   "rank": s.lattice.rank, "det": abs(s.lattice.lattice.det),
                   "aut": canonicalize(s.extended).order}
            if s.lattice.rank == 20:
                row["T"] = transcendental_candidates(s.lattice)
            out.append(row)
        return out

    def line_counts(self, singular: bool) -> list:
        return sorted({s.line_count for s in self.saturations
                       if (s.exceptional_count > 0) == singular})


def kernel_enumeration(ctx: GolayContext) -> list:
    """Geometric kernels of fo containing K_fo, up to Aut C."""
    return geometric_kernels(fo_graph(), 8, 3, base=ctx.kernel_fo(), symmetry=ctx.aut_generators())


def kummer_extensions(ctx: GolayContext, kernel, o: int, r_max: int, kinds=("line", "exceptional"),
                      workers: int = 1, checkpoint=None):
    """Progressive extension of (fo, K) by lines and exceptional divisors; the
    symmetry group is the stabilizer of the class of o in Aut C."""
    base = BaseData(fo_graph(), 8, kernel)
    initial = [v for k in kinds for v in candidates(base, k)]
    sym = Symmetry(ctx.incidence_graph([ctx.eclass(o)]), base.graph)
    ext = Extender(base, sym, initial, m=3, mode="progressive", r_max=r_max,
                   workers=workers, checkpoint=checkpoint)
    return base, ext.run()


def kummer64(ctx: GolayContext, workers: int = 1) -> KummerReport:
    o = ctx.S[6][0]
    rep = KummerReport("K_64")
    base, res = kummer_extensions(ctx, ctx.kernel_64(o), o, 2, workers=workers)
    rep.saturations = res.saturated
    rep.survivor_counts = res.survivor_counts()
    admitted = candidates(base, "line", strict=False)
    rep.notes["line_supports"] = sorted({mask_of(v.support) for v in admitted}) == sorted(ctx.S_n(6, o, 0))
    # the empty support also passes both tests; it is rejected by the geometric check
    exc = [v for v in candidates(base, "exceptional") if v.support]
    rep.notes["divisor_supports"] = sorted({mask_of(v.support) for v in exc}) == sorted(ctx.S_n(4, o, 1))
    rep.notes["octuple_rule"] = all(_octuple_ok(ctx, s, o) for s in rep.saturations if s.exceptional_count)
    return rep


def _octuple_ok(ctx: GolayContext, sat, o: int) -> bool:
    """The exceptional divisors of the saturation have supports forming one
    ≈-class, where r ≈ s iff r ∼ s or r ∼ s △ o."""
    g = sat.extended          # the sixteen lines of fo come first
    supports = [mask_of(i for i in range(16) if g.adjacency[e][i] == 1) for e in g.exceptional()]
    return sorted(supports) == ctx.coarse_class(supports[0], o)


def kummer256(ctx: GolayContext, r_max: int = 3, workers: int = 1) -> KummerReport:
    o = ctx.S[8][0]
    rep = KummerReport("K_256")
    base, res = kummer_extensions(ctx, ctx.kernel_256(o), o, r_max, workers=workers)
    rep.saturations = res.saturated
    rep.survivor_counts = res.survivor_counts()
    admitted = candidates(base, "line", strict=False)
    rep.notes["line_supports"] = (sorted({mask_of(v.support) for v in admitted})
                                  == sorted(ctx.S_n(4, o, 1) + ctx.S_n(6, o, 0)))
    return rep


def triquadric_check(ctx: GolayContext, kernel, n: int = 16) -> dict:
    """3-isotropic vectors over fo: supports passing the Sylvester test and
    the ones that also survive the kernel test."""
    base = BaseData(fo_graph((1 << n) - 1), 8, kernel)
    sizes, survivors = set(), []
    for s in subsets_upto(n, STAR_LIMIT["isotropic"]):
        v = PseudoVertex.isotropic(s, 3)
        if base.sylvester(v) != "fail":
            sizes.add(len(s))
            if base.kernel_test(v):
                survivors.append(s)
    return {"sylvester_sizes": sorted(sizes), "kernel_survivors": survivors}


def almost_kummer(ctx: GolayContext, r_max: int = 4, workers: int = 1, checkpoint=None) -> KummerReport:
    """fo minus one point with its induced kernel, extended by up to four lines."""
    star = 1 << 15
    rep = KummerReport("K_fo*")
    kernel = ctx.kernel_star(star)
    base = BaseData(fo_graph(ctx.ALL ^ star), 8, kernel)
    sym = Symmetry(ctx.incidence_graph([[star]]), base.graph)
    # the empty support completes fo* back to fo; it is kept, and its
    # descendants are the Kummer configurations of the run
    initial = candidates(base, "line", n=15)
    ext = Extender(base, sym, initial, m=3, mode="progressive", r_max=r_max,
                   workers=workers, checkpoint=checkpoint)
    res = ext.run()
    rep.saturations = res.saturated
    rep.survivor_counts = res.survivor_counts()
    return rep
