"""Symmetry-reduced extension of a base graph by extra (pseudo-)vertices.

An extra vertex is identified with its support, the set of base vertices it
meets.  Configurations are keyed by ``(vertices, mu)`` where ``vertices`` is
a sorted tuple of ``(color, support)`` pairs and ``mu`` the upper-triangular
adjacency among the new vertices (all zero in the safe mode).
"""
from __future__ import annotations

import itertools
import json
import logging
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import linalg as la
from .canon import canonicalize
from .fanolattice import (GraphLattice, NotHyperbolic, Saturation, build, geometric_kernels,
                          saturation_list)
from .graph import ColoredGraph
from .lattice import LatticeError
from .taxonomy import DiagramType, NotAdmittedSignature, is_sigma_graph, milnor_number

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    pass


KIND_DEGREE = {"line": 1, "exceptional": 0}


@dataclass(frozen=True)
class PseudoVertex:
    kind: str                      # "line", "exceptional" or "isotropic"
    support: tuple                 # sorted base vertices meeting v with multiplicity 1
    h_degree: int = 1
    iota_degree: int | None = None

    @classmethod
    def line(cls, support):
        return cls("line", tuple(sorted(support)), 1)

    @classmethod
    def exceptional(cls, support):
        return cls("exceptional", tuple(sorted(support)), 0)

    @classmethod
    def isotropic(cls, support, m: int):
        return cls("isotropic", tuple(sorted(support)), m)

    @property
    def norm(self) -> int:
        return 0 if self.kind == "isotropic" else -2

    @property
    def color(self) -> int:
        return self.h_degree


# ------------------------------------------------------------------ base data

class BaseData:
    """Everything about (Γ0, K) needed to test one-vertex extensions."""

    def __init__(self, graph: ColoredGraph, degree: int, kernel=(), m_imposed: int | None = None):
        self.graph = graph
        self.degree = degree
        self.m_imposed = m_imposed
        self.kernel = tuple(tuple(Fraction(x) for x in k) for k in kernel)
        self.gl: GraphLattice = build(graph, degree, self.kernel, m_imposed)
        free = self.gl.free
        self.nfree = len(free)
        self.radical = la.integer_left_kernel(free) if la.det(free) == 0 else []
        E = [list(r) for r in self.gl.base_basis]
        ginv = la.inverse([list(r) for r in self.gl.base.gram])
        # (v*)² = wᵀ Eᵀ G⁻¹ E w for the free pairing vector w
        dual = la.matmul(la.matmul(la.transpose(E), ginv), E)
        self.dual_den = la.denominator_lcm(dual)
        self.dual_int = [[int(x * self.dual_den) for x in row] for row in dual]
        self.kernel_den = la.denominator_lcm(self.kernel) if self.kernel else 1
        self.kernel_int = [[int(x * self.kernel_den) for x in k] for k in self.kernel]
        self.rank = self.gl.rank

    def pairing(self, v: PseudoVertex) -> list:
        """v · (free generator) for h, the base vertices and ι."""
        w = [0] * self.nfree
        w[0] = v.h_degree
        for i in v.support:
            w[i + 1] = 1
        if self.m_imposed is not None:
            w[-1] = v.iota_degree or 0
        return w

    def kernel_test(self, v: PseudoVertex) -> bool:
        w = self.pairing(v)
        return all(sum(a * b for a, b in zip(k, w)) % self.kernel_den == 0 for k in self.kernel_int)

    def radical_test(self, v: PseudoVertex) -> bool:
        w = self.pairing(v)
        return all(la.dot(r, w) == 0 for r in self.radical)

    def dual_norm(self, v: PseudoVertex) -> Fraction:
        w = self.pairing(v)
        nz = [i for i, x in enumerate(w) if x]
        s = sum(w[i] * w[j] * self.dual_int[i][j] for i in nz for j in nz)
        return Fraction(s, self.dual_den)

    def sylvester(self, v: PseudoVertex) -> str:
        """"fail" if v² > (v*)², "neutral" if equal, "pass" otherwise."""
        if not self.radical_test(v):
            return "fail"
        d = self.dual_norm(v)
        if v.norm > d:
            return "fail"
        return "neutral" if v.norm == d else "pass"

    def admits(self, v: PseudoVertex, strict: bool = False) -> bool:
        s = self.sylvester(v)
        if s == "fail" or (strict and s == "neutral"):
            return False
        return self.kernel_test(v)

    def complement(self, vertices, mu) -> list:
        """Gram matrix of the projections of the new vertices to the
        orthogonal complement of the base lattice."""
        ws = [self.pairing(v) for v in vertices]
        nz = [[i for i, x in enumerate(w) if x] for w in ws]
        r = len(vertices)
        out = [[Fraction(0)] * r for _ in range(r)]
        for a in range(r):
            for b in range(a, r):
                own = vertices[a].norm if a == b else mu[a][b]
                s = sum(ws[a][i] * ws[b][j] * self.dual_int[i][j] for i in nz[a] for j in nz[b])
                out[a][b] = out[b][a] = own - Fraction(s, self.dual_den)
        return out

    def multi_sylvester(self, vertices, mu, strict: bool) -> bool:
        """The extension stays hyperbolic (and, if ``strict``, gains rank
        len(vertices))."""
        if not vertices:
            return True
        sp, sm, s0 = la.signature(self.complement(vertices, mu))
        return sp == 0 and (not strict or s0 == 0)

    def pad_kernel(self, extra: int) -> tuple:
        """Kernel vectors in the free coordinates of Γ0 plus ``extra`` vertices."""
        n = self.graph.n
        out = []
        for k in self.kernel:
            out.append(tuple(k[:n + 1]) + (Fraction(0),) * extra + tuple(k[n + 1:]))
        return tuple(out)


def kernel_test(base: BaseData, v: PseudoVertex) -> bool:
    return base.kernel_test(v)


def sylvester_test(base: BaseData, v: PseudoVertex) -> str:
    return base.sylvester(v)


# ------------------------------------------------------------------ configurations

def normalize_config(vertices, mu) -> tuple:
    """Canonical key: vertices sorted, ties broken by the least mu."""
    r = len(vertices)
    order = sorted(range(r), key=lambda i: vertices[i])
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: vertices[i])]
    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        perm = [i for g in choice for i in g]
        m = tuple(mu[perm[a]][perm[b]] for a in range(r) for b in range(a + 1, r))
        if best is None or m < best:
            best = m
    verts = tuple(vertices[i] for i in order)
    return verts, best if best is not None else ()


def mu_matrix(key) -> list:
    verts, flat = key
    r = len(verts)
    mu = [[0] * r for _ in range(r)]
    it = iter(flat)
    for a in range(r):
        for b in range(a + 1, r):
            mu[a][b] = mu[b][a] = next(it)
    return mu


def act_key(perm, key) -> tuple:
    verts, _ = key
    img = [(c, tuple(sorted(perm[i] for i in s))) for c, s in verts]
    return normalize_config(img, mu_matrix(key))


def drop_vertex(key, i: int) -> tuple:
    verts, _ = key
    mu = mu_matrix(key)
    keep = [j for j in range(len(verts)) if j != i]
    return normalize_config([verts[j] for j in keep], [[mu[a][b] for b in keep] for a in keep])


def add_vertex(key, vertex, row) -> tuple:
    verts, _ = key
    mu = mu_matrix(key)
    mu = [list(x) + [row[i]] for i, x in enumerate(mu)]
    mu.append(list(row) + [0])
    return normalize_config(list(verts) + [vertex], mu)


def key_vertices(key) -> list:
    return [PseudoVertex.line(s) if c == 1 else PseudoVertex.exceptional(s) for c, s in key[0]]


def orbit(generators, key) -> set:
    seen = {key}
    frontier = [key]
    while frontier:
        nxt = []
        for k in frontier:
            for g in generators:
                y = act_key(g, k)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def orbit_representatives(generators, keys) -> dict:
    """rep ↦ orbit for the orbits meeting ``keys``; the representative is the
    least key of its orbit."""
    pool = set(keys)
    out = {}
    for k in sorted(pool):
        if k not in pool:
            continue
        orb = orbit(generators, k)
        pool -= orb
        out[min(orb)] = orb
    return dict(sorted(out.items()))


def extension_graph(base: ColoredGraph, key) -> ColoredGraph:
    verts, _ = key
    mu = mu_matrix(key)
    n, r = base.n, len(verts)
    adj = [list(row) + [0] * r for row in base.adjacency] + [[0] * (n + r) for _ in range(r)]
    for a, (_, s) in enumerate(verts):
        for i in s:
            adj[n + a][i] = adj[i][n + a] = 1
        for b in range(r):
            adj[n + a][n + b] = mu[a][b]
    color = list(base.color) + [c for c, _ in verts]
    part = None if base.part is None else list(base.part) + [0] * r
    return ColoredGraph(adj, color, part)


# ------------------------------------------------------------------ symmetry

NEW_VERTEX_COLOR = 10 ** 6
FIXED_COLOR = 10 ** 5


def symmetry_graph(graph: ColoredGraph, fixed=(), pointwise: bool = False) -> ColoredGraph:
    """Γ0 with the vertices of ``fixed`` recolored, so that its automorphisms
    preserve ``fixed`` setwise (or pointwise)."""
    color = list(graph.color)
    for k, v in enumerate(fixed):
        color[v] = FIXED_COLOR + 10 * (k + 1 if pointwise else 0) + graph.color[v]
    return ColoredGraph(graph.adjacency, color)


class Symmetry:
    """G0 as the automorphism group of a colored graph whose first ``n0``
    vertices are Γ0 (further vertices only encode extra structure)."""

    def __init__(self, graph: ColoredGraph, base: ColoredGraph):
        n0 = base.n
        for i in range(n0):
            for j in range(n0):
                if graph.adjacency[i][j] != base.adjacency[i][j]:
                    raise ValueError("symmetry graph does not restrict to the base graph")
        self.graph = graph
        self.n0 = n0
        cf = canonicalize(graph)
        self.generators = tuple(tuple(g[:n0]) for g in cf.generators)
        self.order = cf.order

    @classmethod
    def trivial(cls, base: ColoredGraph) -> "Symmetry":
        return cls(symmetry_graph(base, range(base.n), pointwise=True), base)

    def encode(self, key) -> ColoredGraph:
        verts, _ = key
        mu = mu_matrix(key)
        g, n, r = self.graph, self.graph.n, len(verts)
        adj = [list(row) + [0] * r for row in g.adjacency] + [[0] * (n + r) for _ in range(r)]
        for a, (_, s) in enumerate(verts):
            for i in s:
                adj[n + a][i] = adj[i][n + a] = 1
            for b in range(r):
                adj[n + a][n + b] = mu[a][b]
        return ColoredGraph(adj, list(g.color) + [NEW_VERTEX_COLOR + c for c, _ in verts])

    def certificate(self, key) -> bytes:
        return canonicalize(self.encode(key)).certificate

    def stabilizer(self, key) -> list:
        """Generators of Stab(key) as (permutation of Γ0, permutation of the
        new vertices)."""
        n, r = self.graph.n, len(key[0])
        cf = canonicalize(self.encode(key))
        return [(g[:self.n0], [g[n + a] - n for a in range(r)]) for g in cf.generators]


def _item_orbits(generators, items) -> list:
    """Orbit representatives of (vertex, row) pairs under a parent stabilizer."""
    pool = set(items)
    reps = []
    for it in items:
        if it not in pool:
            continue
        reps.append(it)
        frontier = [it]
        pool.discard(it)
        while frontier:
            nxt = []
            for (c, s), row in frontier:
                for p, q in generators:
                    new_row = [0] * len(row)
                    for j, x in enumerate(row):
                        new_row[q[j]] = x
                    y = ((c, tuple(sorted(p[i] for i in s))), tuple(new_row))
                    if y in pool:
                        pool.discard(y)
                        nxt.append(y)
            frontier = nxt
    return reps


# ------------------------------------------------------------------ preliminary tests

def triangle_free_support(g: ColoredGraph, s) -> bool:
    return all(g.adjacency[a][b] == 0 for a, b in itertools.combinations(s, 2))


def preliminary_tests(key, fiber: DiagramType | None, m: int, base: ColoredGraph) -> bool:
    """Quick support-level tests for lines added to a Σ-graph."""
    verts, _ = key
    mu = mu_matrix(key)
    lines = [set(s) for c, s in verts if c == 1]
    if fiber is not None and fiber > DiagramType("A", 2):
        if not all(triangle_free_support(base, s) for s in lines):
            return False
        for a, b in itertools.combinations(range(len(verts)), 2):
            if mu[a][b] and set(verts[a][1]) & set(verts[b][1]):
                return False
    if fiber is not None and fiber > DiagramType("A", 3):
        if any(len(a & b) > 1 for a, b in itertools.combinations(lines, 2)):
            return False
    if m == 3:
        if any(len(a & b) > 2 for a, b in itertools.combinations(lines, 2)):
            return False
        if any(len(a & b & c) > 1 for a, b, c in itertools.combinations(lines, 3)):
            return False
    return True


# ------------------------------------------------------------------ results

@dataclass
class Candidate:
    key: tuple
    graph: ColoredGraph
    rank: int
    kernels: list = field(default_factory=list)


@dataclass
class StepRecord:
    r: int
    candidates: int = 0
    representatives: int = 0
    survivors: list = field(default_factory=list)      # Candidate, one per G0-orbit
    certificates: set = field(default_factory=set)
    seconds: float = 0.0


@dataclass
class ExtensionResult:
    steps: list
    maxlist: list                   # [(Candidate, [Saturation])]
    plain: list                     # Candidate passing num (Γ0 itself first)
    saturated: list = field(default_factory=list)
    singles: list = field(default_factory=list)    # the invariant set of admitted single vertices
    budget_exceeded: str | None = None

    def survivor_counts(self) -> list:
        return [len(s.survivors) for s in self.steps]


# ------------------------------------------------------------------ the algorithm

@dataclass
class Extender:
    """Steps 1..r_max of the extension algorithm over (Γ0, K) with symmetry G0.

    Each step extends one representative per G0-orbit of the previous step by
    one admitted vertex and keeps one configuration per G0-orbit (by canonical
    certificate), requiring all sub-configurations to be survivors.
    """

    base: BaseData
    symmetry: Symmetry | None = None
    initial: list = field(default_factory=list)   # PseudoVertex candidates (G0-invariant)
    m: int = 3
    fiber: DiagramType | None = None
    mode: str = "safe"
    r_max: int | None = None
    num: object = None                       # graph -> bool, filters the plain output
    Num: object = None                       # plain graph -> bool, filters saturations
    max_graphs: int = 10 ** 7
    geometric: bool = True
    star_rules: bool = False
    checkpoint: str | None = None
    workers: int = 1
    saturate_output: bool = True

    def __post_init__(self):
        if self.mode not in ("safe", "progressive"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.graph0 = self.base.graph
        if self.symmetry is None:
            self.symmetry = Symmetry.trivial(self.graph0)
        self.tested = 0
        self.considered = 0

    @property
    def strict(self) -> bool:
        return self.mode == "progressive"

    # -- single configuration ------------------------------------------------

    def quick(self, key) -> bool:
        if not preliminary_tests(key, self.fiber, self.m, self.graph0):
            return False
        return self.base.multi_sylvester(key_vertices(key), mu_matrix(key), self.strict)

    def evaluate(self, key) -> Candidate | None:
        """Σ-graph check, hyperbolicity, rank, master test and geometric
        kernels.  Returns None on failure."""
        self.tested += 1
        g = extension_graph(self.graph0, key)
        if self.star_rules:
            from .stars import violates_star_rules
            if violates_star_rules(g, self.m, new=range(self.graph0.n, g.n)):
                return None
        if self.fiber is not None and not is_sigma_graph(g.plain(), self.fiber, hyperbolic=False):
            return None
        r = len(key[0])
        kernel = self.base.pad_kernel(r)
        try:
            gl = build(g, self.base.degree, kernel, self.base.m_imposed)
        except (NotHyperbolic, LatticeError):
            return None
        if self.strict and gl.rank != self.base.rank + r:
            return None
        if not self.geometric:
            return Candidate(key, g, gl.rank)
        found = geometric_kernels(g, self.base.degree, self.m, base=kernel,
                                  m_imposed=self.base.m_imposed, first_only=True)
        if not found:
            return None
        return Candidate(key, g, gl.rank, found)

    def _evaluate_all(self, keys) -> list:
        if self.workers > 1 and len(keys) > 1:
            return _parallel_evaluate(self, keys)
        return [self.evaluate(k) for k in keys]

    def _count(self, k: int = 1) -> None:
        self.considered += k
        if self.considered > self.max_graphs:
            raise BudgetExceeded(f"more than {self.max_graphs} configurations considered")

    # -- steps -----------------------------------------------------------------

    def step1(self):
        t0 = time.time()
        rec = StepRecord(1)
        keys = set()
        for v in self.initial:
            if self.base.admits(v, strict=self.strict):
                keys.add((((v.color, v.support),), ()))
        rec.candidates = len(keys)
        self._count(len(keys))
        reps = orbit_representatives(self.symmetry.generators, keys)
        good = [k for k in reps if self.quick(k)]
        rec.representatives = len(good)
        singles = set()
        for k, cand in zip(good, self._evaluate_all(good)):
            if cand is not None:
                rec.survivors.append(cand)
                singles |= reps[k]
        rec.seconds = time.time() - t0
        self._log(rec)
        return rec, sorted(k[0][0] for k in singles)

    def step(self, r: int, prev: StepRecord, singles) -> StepRecord:
        t0 = time.time()
        rec = StepRecord(r)
        rows = [(0,) * (r - 1)] if self.mode == "safe" else list(itertools.product((0, 1), repeat=r - 1))
        seen, todo = set(), []
        for parent in prev.survivors:
            if parent.rank >= 20:
                continue
            items = []
            for v in singles:
                for row in rows:
                    self._count()
                    child = add_vertex(parent.key, v, row)
                    if self.quick(child):
                        items.append((v, row))
            rec.candidates += len(items)
            for v, row in _item_orbits(self.symmetry.stabilizer(parent.key), items):
                child = add_vertex(parent.key, v, row)
                cert = self.symmetry.certificate(child)
                if cert in seen:
                    continue
                seen.add(cert)
                if r > 2 and not all(self.symmetry.certificate(drop_vertex(child, i)) in prev.certificates
                                     for i in range(r)):
                    continue
                todo.append((cert, child))
        todo.sort()
        rec.representatives = len(todo)
        for (cert, key), cand in zip(todo, self._evaluate_all([k for _, k in todo])):
            if cand is not None:
                rec.survivors.append(cand)
                if cand.rank < 20:
                    rec.certificates.add(cert)
        rec.seconds = time.time() - t0
        self._log(rec)
        return rec

    def _log(self, rec: StepRecord) -> None:
        if rec.r == 1:
            rec.certificates = {self.symmetry.certificate(c.key) for c in rec.survivors if c.rank < 20}
        log.info("step %d: %d candidates, %d orbits tested, %d survivors (%.1fs)", rec.r,
                 rec.candidates, rec.representatives, len(rec.survivors), rec.seconds)

    # -- driver ------------------------------------------------------------------

    def run(self) -> ExtensionResult:
        steps, maxlist, singles = [], [], []
        budget = None
        resumed = self._load_checkpoint()
        try:
            if resumed:
                steps, singles = resumed
            else:
                rec, singles = self.step1()
                steps.append(rec)
                self._save_checkpoint(steps, singles)
            while (any(c.rank < 20 for c in steps[-1].survivors)
                   and (self.r_max is None or steps[-1].r < self.r_max)):
                steps.append(self.step(steps[-1].r + 1, steps[-1], singles))
                self._save_checkpoint(steps, singles)
        except BudgetExceeded as exc:
            budget = str(exc)
            log.warning("budget exceeded: %s", exc)
        for rec in steps:
            self._divert(rec, maxlist)
        num = self.num or (lambda g: True)
        plain = [c for rec in steps for c in rec.survivors if num(c.graph)]
        if num(self.graph0):
            plain.insert(0, Candidate(((), ()), self.graph0, self.base.rank))
        res = ExtensionResult(steps, maxlist, plain, singles=singles, budget_exceeded=budget)
        if self.saturate_output:
            res.saturated = self.saturated_output(res)
        return res

    def _divert(self, rec: StepRecord, maxlist: list) -> None:
        """Convention on maximal rank: rank-20 survivors leave the output and
        go to the max-rank list together with their saturations."""
        keep = []
        for c in rec.survivors:
            if c.rank >= 20:
                maxlist.append((c, self.saturations(c) if self.saturate_output else []))
            else:
                keep.append(c)
        rec.survivors = keep

    def saturations(self, c: Candidate) -> list:
        r = len(c.key[0])
        sats = saturation_list(c.graph, self.base.degree, self.m, base=self.base.pad_kernel(r),
                               m_imposed=self.base.m_imposed)
        Num = self.Num or (lambda g: True)
        return [s for s in sats if Num(s.plain)]

    def saturated_output(self, res: ExtensionResult) -> list:
        sats = []
        r0 = self.base.rank
        for c in res.plain:
            if c.rank == r0 + len(c.key[0]):
                sats.extend(self.saturations(c))
        for _, ss in res.maxlist:
            sats.extend(ss)
        return ultimate_sort(sats)

    # -- checkpoints ---------------------------------------------------------------

    def _save_checkpoint(self, steps, singles) -> None:
        if not self.checkpoint:
            return
        os.makedirs(self.checkpoint, exist_ok=True)
        data = {"singles": [[c, list(s)] for c, s in singles],
                "steps": [{"r": s.r, "candidates": s.candidates, "representatives": s.representatives,
                           "survivors": [[_key_json(c.key), c.rank] for c in s.survivors],
                           "seconds": s.seconds} for s in steps]}
        path = os.path.join(self.checkpoint, "state.json")
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(data, fh)
        os.replace(tmp, path)

    def _load_checkpoint(self):
        if not self.checkpoint:
            return None
        path = os.path.join(self.checkpoint, "state.json")
        if not os.path.exists(path):
            return None
        with open(path) as fh:
            data = json.load(fh)
        steps = []
        for s in data["steps"]:
            rec = StepRecord(s["r"], s["candidates"], s["representatives"], seconds=s["seconds"])
            for kj, rank in s["survivors"]:
                key = _key_from_json(kj)
                rec.survivors.append(Candidate(key, extension_graph(self.graph0, key), rank))
            rec.certificates = {self.symmetry.certificate(c.key) for c in rec.survivors if c.rank < 20}
            steps.append(rec)
        singles = [(c, tuple(s)) for c, s in data["singles"]]
        log.info("resumed %d steps from %s", len(steps), path)
        return steps, singles


def _key_json(key):
    verts, mu = key
    return [[[c, list(s)] for c, s in verts], list(mu)]


def _key_from_json(obj):
    verts, mu = obj
    return tuple((c, tuple(s)) for c, s in verts), tuple(mu)


_WORKER = None


def _worker_eval(key):
    return _WORKER.evaluate(key)


def _parallel_evaluate(ext: Extender, keys) -> list:
    import multiprocessing as mp
    global _WORKER
    _WORKER = ext
    with mp.get_context("fork").Pool(ext.workers) as pool:
        out = pool.map(_worker_eval, keys, chunksize=1)
    ext.tested += len(keys)
    return out


def ultimate_sort(sats) -> list:
    """One saturation per isomorphism class of the extended graph."""
    seen = {}
    for s in sats:
        cert = canonicalize(s.extended).certificate
        if cert not in seen:
            seen[cert] = s
    return [seen[c] for c in sorted(seen)]


def extend(base: BaseData, symmetry: Symmetry | None = None, initial=(), **kw) -> ExtensionResult:
    return Extender(base, symmetry, list(initial), **kw).run()
