"""Dynkin and affine Dynkin recognition, graph types, pencils and patterns."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, total_ordering

from . import linalg as la
from .canon import canonicalize
from .graph import ColoredGraph


class NotAdmittedSignature(ValueError):
    pass


# ------------------------------------------------------------------ diagram types

KIND_ORDER = {"A": 0, "D": 1, "E": 2}


@total_ordering
@dataclass(frozen=True)
class DiagramType:
    """A, D, E (affine=False) or Ã, D̃, Ẽ (affine=True) of Milnor number ``rank``."""

    kind: str
    rank: int
    affine: bool = True

    def __str__(self) -> str:
        return ("~" if self.affine else "") + f"{self.kind}{self.rank}"

    def key(self):
        return (self.rank, KIND_ORDER[self.kind])

    def __lt__(self, other: "DiagramType"):
        return self.key() < other.key()

    @property
    def size(self) -> int:
        return self.rank + (1 if self.affine else 0)

    @classmethod
    def parse(cls, text: str) -> "DiagramType":
        t = text.strip()
        affine = t[0] == "~"
        if affine:
            t = t[1:]
        return cls(t[0].upper(), int(t[1:]), affine)


def _arms_tree(arms) -> list:
    """Edges of a tree: center 0 with arms of the given lengths."""
    edges, nxt = [], 1
    for a in arms:
        prev = 0
        for _ in range(a):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return edges, nxt


def diagram(t: DiagramType) -> ColoredGraph:
    """Standard diagram with vertices in the fixed order used for patterns:
    Ã_n cyclic; D̃_n, D_n with the branch vertex first; Ẽ/E center first."""
    n, k = t.rank, t.kind
    if t.affine:
        if k == "A":
            if n == 1:
                return ColoredGraph.from_edges(2, [(0, 1, 2)])
            return ColoredGraph.from_edges(n + 1, [(i, (i + 1) % (n + 1)) for i in range(n + 1)])
        if k == "D":
            if n == 4:
                return ColoredGraph.from_edges(5, [(0, i) for i in range(1, 5)])
            # branch 0 with leaves 1, 2; path 0 = p0 … p_{n-4} = b; b with leaves
            path = [0] + list(range(3, n - 1))
            edges = [(0, 1), (0, 2)] + list(zip(path, path[1:]))
            b = path[-1]
            edges += [(b, n - 1), (b, n)]
            return ColoredGraph.from_edges(n + 1, edges)
        arms = {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}[n]
        edges, size = _arms_tree(arms)
        return ColoredGraph.from_edges(size, edges)
    if k == "A":
        return ColoredGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if k == "D":
        if n < 4:
            raise ValueError("D_n needs n ≥ 4")
        edges, size = _arms_tree((1, 1, n - 3))
        return ColoredGraph.from_edges(size, edges)
    arms = {6: (1, 2, 2), 7: (1, 2, 3), 8: (1, 2, 4)}[n]
    edges, size = _arms_tree(arms)
    return ColoredGraph.from_edges(size, edges)


def _uncolored(g: ColoredGraph) -> ColoredGraph:
    return ColoredGraph(g.adjacency, (1,) * g.n)


def gram_of(g: ColoredGraph, vertices=None) -> list:
    vs = range(g.n) if vertices is None else list(vertices)
    vs = list(vs)
    return [[-2 if a == b else g.adjacency[a][b] for b in vs] for a in vs]


def _catalogue(size: int, affine: bool) -> list:
    out = []
    if affine:
        n = size - 1
        if n >= 1:
            out.append(DiagramType("A", n))
        if n >= 4:
            out.append(DiagramType("D", n))
        if n in (6, 7, 8):
            out.append(DiagramType("E", n))
    else:
        n = size
        out.append(DiagramType("A", n, False))
        if n >= 4:
            out.append(DiagramType("D", n, False))
        if n in (6, 7, 8):
            out.append(DiagramType("E", n, False))
    return out


@lru_cache(maxsize=None)
def _certificate(t: DiagramType) -> bytes:
    return canonicalize(_uncolored(diagram(t))).certificate


def recognize(g: ColoredGraph, vertices) -> DiagramType | None:
    """Type of a connected elliptic or parabolic induced subgraph, by
    isomorphism against the catalogue; None otherwise."""
    vs = list(vertices)
    sub = _uncolored(g.induced(vs))
    sp, sm, s0 = la.signature(gram_of(sub))
    if sp:
        return None
    if s0 > 1:
        return None
    cert = canonicalize(sub).certificate
    for t in _catalogue(len(vs), affine=s0 == 1):
        if _certificate(t) == cert:
            return t
    return None


# ------------------------------------------------------------------ decompositions

@dataclass
class DynkinDecomposition:
    components: list                 # [(DiagramType, vertex list)]
    milnor: int

    def count(self, t: DiagramType) -> int:
        return sum(1 for c, _ in self.components if c == t)

    def affine(self) -> list:
        return [(t, vs) for t, vs in self.components if t.affine]

    def __str__(self) -> str:
        parts = {}
        for t, _ in self.components:
            parts[str(t)] = parts.get(str(t), 0) + 1
        return " + ".join((f"{k}" if v == 1 else f"{v}{k}") for k, v in sorted(parts.items()))


def milnor_number(g: ColoredGraph, vertices=None) -> int:
    gr = gram_of(g, vertices)
    return la.rank(gr) if gr else 0


def decompose(g: ColoredGraph) -> DynkinDecomposition:
    """Components of an elliptic or parabolic graph."""
    comps = []
    for comp in g.components():
        t = recognize(g, comp)
        if t is None:
            raise NotAdmittedSignature(f"component {comp} is neither Dynkin nor affine Dynkin")
        comps.append((t, comp))
    comps.sort(key=lambda c: (c[0].key(), c[0].affine, c[1]))
    return DynkinDecomposition(comps, milnor_number(g))


def fundamental_cycle(g: ColoredGraph, vertices=None) -> list:
    """Primitive positive annihilator of a connected parabolic graph."""
    vs = list(range(g.n)) if vertices is None else list(vertices)
    gr = gram_of(g, vs)
    ker = la.integer_left_kernel(gr)
    if len(ker) != 1:
        raise ValueError("not a connected parabolic graph")
    k = list(ker[0])
    if sum(k) < 0:
        k = [-x for x in k]
    from math import gcd
    d = 0
    for x in k:
        d = gcd(d, x)
    k = [x // d for x in k]
    if any(x <= 0 for x in k):
        raise ValueError("annihilator is not positive")
    return k


# ------------------------------------------------------------------ girth and type

def girth(g: ColoredGraph) -> float:
    """Length of a shortest cycle; a double edge counts as a 2-cycle."""
    if any(m >= 2 for _, _, m in g.edges()):
        return 2
    best = float("inf")
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in g.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    q.append(w)
                elif parent[v] != w:
                    best = min(best, dist[v] + dist[w] + 1)
    return best


def shortest_cycle(g: ColoredGraph) -> list | None:
    """Vertices of one shortest cycle (in cyclic order)."""
    gi = girth(g)
    if gi == float("inf"):
        return None
    for u, v, m in g.edges():
        if m >= 2:
            return [u, v]
    for s in range(g.n):
        dist, parent = {s: 0}, {s: -1}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in g.neighbors(v):
                if w not in dist:
                    dist[w], parent[w] = dist[v] + 1, v
                    q.append(w)
                elif parent[v] != w and dist[v] + dist[w] + 1 == gi:
                    a, b = [v], [w]
                    while parent[a[-1]] != -1:
                        a.append(parent[a[-1]])
                    while parent[b[-1]] != -1:
                        b.append(parent[b[-1]])
                    if a[-1] == b[-1] and not set(a[:-1]) & set(b[:-1]):
                        return a[::-1] + b[:-1]
    return None


def independence_number(g: ColoredGraph) -> int:
    """Size of a largest independent set (branch and bound)."""
    nbr = [set(g.neighbors(v)) for v in range(g.n)]
    best = 0

    def rec(cand: set, size: int):
        nonlocal best
        if size + len(cand) <= best:
            return
        if not cand:
            best = max(best, size)
            return
        v = max(cand, key=lambda x: len(nbr[x] & cand))
        if not nbr[v] & cand:
            best = max(best, size + len(cand))
            return
        rec(cand - {v} - nbr[v], size + 1)
        rec(cand - {v}, size)

    rec(set(range(g.n)), 0)
    return best


def _dist_from(g: ColoredGraph, s: int) -> dict:
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def _arm_depth(g: ColoredGraph, center: int, first: int, cap: int) -> int:
    """Longest simple path (≤ cap vertices) starting center → first → …"""
    best = 0
    stack = [(first, 1, {center, first})]
    while stack:
        v, depth, seen = stack.pop()
        best = max(best, depth)
        if best >= cap:
            return cap
        for w in g.neighbors(v):
            if w not in seen:
                stack.append((w, depth + 1, seen | {w}))
    return best


def minimal_fiber_type(g: ColoredGraph) -> DiagramType | None:
    """Type of a minimal fiber: the least affine Dynkin diagram occurring
    as an induced subgraph."""
    cands = []
    gi = girth(g)
    if gi != float("inf"):
        cands.append(DiagramType("A", int(gi) - 1))
    limit = int(gi) - 1 if gi != float("inf") else 10 ** 6   # tree-like below girth
    deg = [len(g.neighbors(v)) for v in range(g.n)]
    if any(d >= 4 for d in deg) and 4 < limit:
        cands.append(DiagramType("D", 4))
    branch = [v for v in range(g.n) if deg[v] >= 3]
    best_d = None
    for i, b in enumerate(branch):
        dist = _dist_from(g, b)
        for c in branch[i + 1:]:
            if c in dist:
                n = 4 + dist[c]
                if n < limit and (best_d is None or n < best_d):
                    best_d = n
    if best_d is not None:
        cands.append(DiagramType("D", best_d))
    for n, arms in ((6, (2, 2, 2)), (7, (1, 3, 3)), (8, (1, 2, 5))):
        if n >= limit:
            continue
        need = sorted(arms, reverse=True)
        for c in branch:
            depths = sorted((_arm_depth(g, c, w, 5) for w in g.neighbors(c)), reverse=True)
            if len(depths) >= 3 and all(depths[i] >= need[i] for i in range(3)):
                cands.append(DiagramType("E", n))
                break
    return min(cands) if cands else None


def hyperbolic_type(g: ColoredGraph) -> str:
    sp, sm, s0 = la.signature(gram_of(g)) if g.n else (0, 0, 0)
    if sp >= 2:
        raise NotAdmittedSignature(f"σ+ = {sp}")
    if sp == 1:
        return "hyperbolic"
    return "parabolic" if s0 else "elliptic"


@dataclass
class Classification:
    signature_class: str
    fiber_type: DiagramType | None
    girth: float
    independence: int
    decomposition: DynkinDecomposition | None = None

    @property
    def girth_class(self) -> str:
        t = self.fiber_type
        if t is None:
            return "elliptic"
        names = {DiagramType("A", 2): "triangular", DiagramType("A", 3): "quadrangular",
                 DiagramType("A", 4): "pentagonal", DiagramType("D", 4): "astral"}
        return names.get(t, "locally elliptic")


def classify(g: ColoredGraph, independence: bool = True) -> Classification:
    sc = hyperbolic_type(g)
    dec = decompose(g) if sc != "hyperbolic" else None
    t = minimal_fiber_type(g)
    alpha = independence_number(g) if independence else -1
    return Classification(sc, t, girth(g), alpha, dec)


def is_sigma_graph(g: ColoredGraph, sigma: DiagramType, hyperbolic: bool = True) -> bool:
    try:
        sc = hyperbolic_type(g)
    except NotAdmittedSignature:
        return False
    if hyperbolic and sc != "hyperbolic":
        return False
    return minimal_fiber_type(g) == sigma


def find_fiber(g: ColoredGraph, sigma: DiagramType) -> list | None:
    """Vertices of one induced subgraph of the given affine type."""
    if sigma.kind == "A":
        if sigma.rank == 1:
            for u, v, m in g.edges():
                if m == 2:
                    return [u, v]
            return None
        # shortest cycle of the right length, found by search
        target = sigma.rank + 1
        for s in range(g.n):
            stack = [[s]]
            while stack:
                path = stack.pop()
                if len(path) == target:
                    if path[0] in g.neighbors(path[-1]):
                        if recognize(g, path) == sigma:
                            return path
                    continue
                for w in g.neighbors(path[-1]):
                    if w > s and w not in path:
                        stack.append(path + [w])
        return None
    size = sigma.size
    for combo in itertools.combinations(range(g.n), size):
        if recognize(g, combo) == sigma:
            return list(combo)
    return None


# ------------------------------------------------------------------ pencils

@dataclass
class PencilView:
    fiber: list
    pencil: list
    fibers: list                       # [(DiagramType, vertices)] parabolic components
    elliptic: list                     # [(DiagramType, vertices)]
    sections: dict                     # fiber vertex ↦ [sections]
    multiplicity: dict                 # section ↦ multiplicity
    kappa: dict                        # fiber vertex ↦ n_v
    milnor: int

    @property
    def all_sections(self) -> list:
        return sorted({s for v in self.sections.values() for s in v})

    def simple_sections(self) -> list:
        return [s for s in self.all_sections if self.multiplicity[s] == 1]

    def pi_bound_holds(self) -> bool:
        return len(self.pencil) == self.milnor + len(self.fibers)

    def section_counts(self) -> list:
        return [len(self.sections[v]) for v in self.fiber]


def pencil_of(g: ColoredGraph, fiber) -> PencilView:
    fiber = list(fiber)
    fset = set(fiber)
    kap = dict(zip(fiber, fundamental_cycle(g, fiber)))
    pencil = fiber + [v for v in range(g.n) if v not in fset
                      and all(g.adjacency[v][l] == 0 for l in fiber)]
    sub = g.induced(pencil)
    fibers, ell = [], []
    for comp in sub.components():
        vs = [pencil[i] for i in comp]
        t = recognize(g, vs)
        if t is None:
            raise NotAdmittedSignature(f"pencil component {vs} is not (affine) Dynkin")
        (fibers if t.affine else ell).append((t, vs))
    sections = {l: [v for v in range(g.n) if v not in fset and g.adjacency[v][l] == 1] for l in fiber}
    mult = {}
    for s in {s for v in sections.values() for s in v}:
        mult[s] = sum(kap[l] * g.adjacency[s][l] for l in fiber)
    view = PencilView(fiber, pencil, fibers, ell, sections, mult, kap, milnor_number(g, pencil))
    if not view.pi_bound_holds():
        raise AssertionError("|Π| = μ(Π) + #fibers fails")
    return view


def section_multiplicity_consistent(g: ColoredGraph, view: PencilView) -> bool:
    """Multiplicity of each section is the same for every fiber of the pencil."""
    for s in view.all_sections:
        for _, vs in view.fibers:
            k = fundamental_cycle(g, vs)
            m = sum(n * g.adjacency[s][v] for n, v in zip(k, vs))
            if m != view.multiplicity[s]:
                return False
    return True


# ------------------------------------------------------------------ patterns

def diagram_automorphisms(t: DiagramType) -> list:
    """All automorphisms of the standard diagram, as permutations."""
    g = diagram(t)
    cf = canonicalize(g)
    n = g.n
    group = {tuple(range(n))}
    frontier = [tuple(range(n))]
    while frontier:
        nxt = []
        for p in frontier:
            for s in cf.generators:
                q = tuple(s[p[i]] for i in range(n))
                if q not in group:
                    group.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(group)


def valencies(t: DiagramType) -> list:
    g = diagram(t)
    return [sum(1 for _ in g.neighbors(v)) for v in range(g.n)]


def default_bounds(t: DiagramType, m: int = 3) -> list:
    """b_i = v_max − val(a_i), with v_max = 7 (m = 3) or 8 (m = 2)."""
    vmax = 7 if m >= 3 else 8
    return [vmax - v for v in valencies(t)]


# b_{ij} and b_{i0} tables (1-based in the literature, 0-based here)
def pair_bounds(t: DiagramType):
    n = t.size
    if t == DiagramType("D", 4):
        bij = [[0] * n for _ in range(n)]
        bi0 = [1] * n
        b0i = [6] + [5] * 4
    elif t == DiagramType("A", 4):
        bij = [[1 if (i - j) % 5 in (2, 3) else 0 for j in range(n)] for i in range(n)]
        bi0 = [1] * n
        b0i = [6] * n
    elif t == DiagramType("A", 3):
        bij = [[0 if i == j else (1 if (i - j) % 4 in (1, 3) else 2) for j in range(n)] for i in range(n)]
        bi0 = [2] * n
        b0i = [5] * n
    else:
        return None
    return bij, bi0, b0i


@dataclass
class PatternTable:
    fiber: DiagramType
    bounds: list
    patterns: tuple
    central_max_valency: bool = False
    pair: tuple | None = None
    _ranges: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.patterns)

    def range(self, rho: dict, subset, M: int) -> set:
        key = (tuple(sorted(rho.items())), tuple(sorted(subset)), M)
        if key not in self._ranges:
            out = set()
            for p in self.patterns:
                if all(p[i] == v for i, v in rho.items()) and sum(p) >= M:
                    out.add(sum(p[i] for i in subset))
            self._ranges[key] = out
        return self._ranges[key]

    def as_text(self) -> str:
        lines = [f"# patterns of {self.fiber}: {len(self.patterns)}", f"# bounds {self.bounds}"]
        lines += [" ".join(map(str, p)) for p in self.patterns]
        return "\n".join(lines) + "\n"


def lex_max_patterns(t: DiagramType, bounds) -> list:
    auts = diagram_automorphisms(t)
    out = []
    for p in itertools.product(*(range(b + 1) for b in bounds)):
        best = True
        for g in auts:
            q = [0] * len(p)
            for i, x in enumerate(p):
                q[g[i]] = x
            if tuple(q) > p:
                best = False
                break
        if best:
            out.append(p)
    return out


_PATTERNS = {}


def patterns(t: DiagramType | str, m: int = 3, bounds=None, central_max_valency=None) -> PatternTable:
    """Lexicographically maximal orbit representatives of Σ-patterns.

    For D̃4 the branch vertex is assumed to have the largest valency in the
    whole graph (π(a_i) ≤ π(a_1) + 3), as in the astral case analysis.
    """
    if isinstance(t, str):
        t = DiagramType.parse(t)
    if bounds is None:
        bounds = default_bounds(t, m)
    if central_max_valency is None:
        central_max_valency = t == DiagramType("D", 4)
    key = (t, tuple(bounds), central_max_valency)
    if key not in _PATTERNS:
        pats = lex_max_patterns(t, bounds)
        if central_max_valency:
            val = valencies(t)
            pats = [p for p in pats if all(p[i] + val[i] <= p[0] + val[0] for i in range(len(p)))]
        _PATTERNS[key] = PatternTable(t, list(bounds), tuple(pats), central_max_valency, pair_bounds(t))
    return _PATTERNS[key]


def ranges(table: PatternTable, rho: dict, subset, M: int) -> set:
    return table.range(rho, subset, M)


# ------------------------------------------------------------------ search config

@dataclass
class SearchConfig:
    degree: int = 8
    m: int = 3
    fiber: str = "~A3"
    M: int | None = None
    M_Sigma: int | None = None
    M_Pi: int | None = None
    Mlines: int | None = None
    Msing: int = 4
    mode: str = "safe"
    r_max: int | None = None
    sigma: list | None = None          # level order for large pencils (0-based)
    r_break: int | None = None
    max_graphs: int = 10 ** 7
    bounds: list | None = None

    def __post_init__(self):
        if self.mode not in ("safe", "progressive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.m not in (1, 2, 3):
            raise ValueError("m must be 1, 2 or 3")
        if self.M is not None and self.M_Sigma is not None and self.M_Pi is not None:
            if self.M_Sigma + self.M_Pi > self.M + 1:
                raise ValueError("thresholds violate M_Sigma + M_Pi ≤ M + 1")

    @property
    def fiber_type(self) -> DiagramType:
        return DiagramType.parse(self.fiber)

    def pattern_table(self) -> PatternTable:
        return patterns(self.fiber_type, self.m, self.bounds)

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        return cls(**d)
