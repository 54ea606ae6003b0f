"""Canonical labeling and automorphism groups of colored multigraphs.

Individualization–refinement with automorphism pruning.  Group orders come
from the generators via Schreier–Sims (sympy).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from sympy.combinatorics import Permutation, PermutationGroup

from .graph import ColoredGraph


@dataclass(frozen=True)
class CanonicalForm:
    certificate: bytes
    labeling: tuple          # labeling[v] = canonical position of v
    generators: tuple        # each generator g maps v ↦ g[v]
    n: int

    @cached_property
    def order(self) -> int:
        return group_order(self.generators, self.n)

    @cached_property
    def orbits(self) -> tuple:
        return orbits_of(self.generators, self.n)

    def canonical_graph(self, g: ColoredGraph) -> ColoredGraph:
        return g.permuted(self.labeling)


def group_order(generators, n: int) -> int:
    gens = [Permutation(list(g)) for g in generators if list(g) != list(range(n))]
    if not gens:
        return 1
    return int(PermutationGroup(gens).order())


def orbits_of(generators, n: int) -> tuple:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators:
        for v in range(n):
            a, b = find(v), find(g[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return tuple(tuple(vs) for vs in sorted(groups.values()))


class _Search:
    def __init__(self, g: ColoredGraph, init_keys):
        self.g = g
        self.n = g.n
        self.nbrs = [[(w, m) for w, m in enumerate(row) if m] for row in g.adjacency]
        keys = sorted(set(init_keys))
        self.cells0 = [[v for v in range(self.n) if init_keys[v] == k] for k in keys]
        self.header = repr([(k, len(c)) for k, c in zip(keys, self.cells0)]).encode()
        self.gens = []
        self.first = None       # (traces, cert, lab, path)
        self.best = None

    def refine(self, cells):
        trace = []
        nbrs = self.nbrs
        while True:
            cellof = {}
            for ci, c in enumerate(cells):
                for v in c:
                    cellof[v] = ci
            new, changed = [], False
            for c in cells:
                if len(c) == 1:
                    new.append(c)
                    continue
                groups = {}
                for v in c:
                    cnt = {}
                    for w, m in nbrs[v]:
                        k = (cellof[w], m)
                        cnt[k] = cnt.get(k, 0) + 1
                    groups.setdefault(tuple(sorted(cnt.items())), []).append(v)
                if len(groups) == 1:
                    new.append(c)
                    continue
                changed = True
                for k in sorted(groups):
                    new.append(groups[k])
                    trace.append((len(new), len(groups[k]), k))
            cells = new
            if not changed:
                return cells, tuple(trace)

    def certificate(self, lab):
        adj = self.g.adjacency
        n = self.n
        return bytes(adj[lab[i]][lab[j]] for i in range(n) for j in range(i + 1, n))

    def fixing(self, path):
        return [g for g in self.gens if all(g[p] == p for p in path)]

    def run(self):
        self.node(self.cells0, [], [])

    def node(self, cells, path, traces):
        cells, tr = self.refine(cells)
        traces = traces + [tr]
        depth = len(path)
        if self.best is not None:
            prefix = traces[: depth + 1]
            if prefix != self.first[0][: depth + 1] and prefix < self.best[0][: depth + 1]:
                return None
        if len(cells) == self.n:
            return self.leaf(cells, path, traces)
        size = max(len(c) for c in cells)
        ti = next(i for i, c in enumerate(cells) if len(c) == size)
        target = cells[ti]
        tried = []
        for v in sorted(target):
            if tried and self.equivalent(v, tried, path):
                continue
            child = cells[:ti] + [[v], [w for w in target if w != v]] + cells[ti + 1:]
            jump = self.node(child, path + [v], traces)
            tried.append(v)
            if jump is not None and jump < depth:
                return jump
        return None

    def equivalent(self, v, tried, path):
        gens = self.fixing(path)
        if not gens:
            return False
        orb = {v}
        frontier = [v]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = g[x]
                    if y not in orb:
                        orb.add(y)
                        nxt.append(y)
            frontier = nxt
        return any(t in orb for t in tried)

    def leaf(self, cells, path, traces):
        lab = [c[0] for c in cells]
        cert = self.certificate(lab)
        if self.first is None:
            self.first = (traces, cert, lab, path)
            self.best = (traces, cert, lab)
            return None
        ftr, fcert, flab, fpath = self.first
        if traces == ftr and cert == fcert:
            self.add_gen(flab, lab)
            common = 0
            while common < len(path) and path[common] == fpath[common]:
                common += 1
            return common
        btr, bcert, blab = self.best
        key, bkey = (traces, cert), (btr, bcert)
        if key == bkey:
            self.add_gen(blab, lab)
        elif key > bkey:
            self.best = (traces, cert, lab)
        return None

    def add_gen(self, lab_a, lab_b):
        perm = [0] * self.n
        for a, b in zip(lab_a, lab_b):
            perm[a] = b
        if perm != list(range(self.n)):
            self.gens.append(tuple(perm))


def _initial_keys(g: ColoredGraph, fixed, pointwise, vertex_keys):
    fixed = list(fixed) if fixed is not None else []
    fixed_pos = {v: i for i, v in enumerate(fixed)}
    keys = []
    for v in range(g.n):
        if v in fixed_pos:
            fk = fixed_pos[v] if pointwise else 0
        else:
            fk = len(fixed) if pointwise else 1
        part = g.part[v] if g.part is not None else -1
        extra = vertex_keys[v] if vertex_keys is not None else 0
        keys.append((fk, g.color[v], part, extra))
    return keys


def canonicalize(g: ColoredGraph, fixed=None, pointwise: bool = False,
                 vertex_keys=None) -> CanonicalForm:
    """Canonical form of ``g``.  ``fixed`` is kept as a set (or pointwise, in
    the given order); ``vertex_keys`` adds arbitrary comparable vertex labels."""
    keys = _initial_keys(g, fixed, pointwise, vertex_keys)
    s = _Search(g, keys)
    if g.n:
        s.run()
        traces, cert, lab = s.best
    else:
        traces, cert, lab = [], b"", []
    labeling = [0] * g.n
    for pos, v in enumerate(lab):
        labeling[v] = pos
    full = s.header + b"|" + repr(traces).encode() + b"|" + cert
    return CanonicalForm(full, tuple(labeling), tuple(s.gens), g.n)


def automorphism_order(g: ColoredGraph, **kw) -> int:
    return canonicalize(g, **kw).order


def isomorphic(a: ColoredGraph, b: ColoredGraph) -> bool:
    return a.n == b.n and canonicalize(a).certificate == canonicalize(b).certificate


def sort_extensions(graphs, base_size: int):
    """Deduplicate graphs sharing the first ``base_size`` vertices (Γ0) up to
    isomorphisms preserving Γ0 as a set.  Returns [(graph, CanonicalForm)]."""
    seen = {}
    for g in graphs:
        cf = canonicalize(g, fixed=range(base_size))
        if cf.certificate not in seen:
            seen[cf.certificate] = (g, cf)
    return [seen[k] for k in sorted(seen)]
