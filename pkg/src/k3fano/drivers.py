"""Level-by-level drivers: sections at a single fiber and large pencils.

Both drive :class:`search.Extender` once per input graph and level, with
the fiber Σ kept as the first vertices of every graph.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .canon import canonicalize
from .graph import ColoredGraph
from .search import (FIXED_COLOR, BaseData, Extender, PseudoVertex, Symmetry,
                     symmetry_graph, ultimate_sort)
from .taxonomy import (DiagramType, SearchConfig, diagram, diagram_automorphisms,
                       fundamental_cycle, is_sigma_graph, pencil_of)

log = logging.getLogger(__name__)


class UnsettledGraph(RuntimeError):
    pass


@dataclass
class LevelRecord:
    level: int
    inputs: int
    outputs: int
    survivor_counts: list = field(default_factory=list)


@dataclass
class DriverResult:
    levels: list = field(default_factory=list)
    graphs: list = field(default_factory=list)          # plain outputs of the last level
    saturated: list = field(default_factory=list)       # Saturation objects
    unsettled: list = field(default_factory=list)
    budget_exceeded: list = field(default_factory=list)

    def survivor_counts(self) -> list:
        return [[lv.level, lv.inputs, lv.outputs, lv.survivor_counts] for lv in self.levels]


def sections_of(g: ColoredGraph, fiber) -> list:
    """sec a for every a ∈ Σ (vertices outside Σ meeting a once)."""
    fset = set(fiber)
    return [[v for v in range(g.n) if v not in fset and g.adjacency[v][a] == 1] for a in fiber]


def disjoint_from(g: ColoredGraph, fiber) -> list:
    fset = set(fiber)
    return [v for v in range(g.n) if v not in fset and all(g.adjacency[v][a] == 0 for a in fiber)]


def bounded_subsets(groups, caps):
    """All unions of subsets T_j ⊂ groups[j] with |T_j| ≤ caps[j]."""
    pools = [[c for k in range(min(cap, len(grp)) + 1) for c in itertools.combinations(grp, k)]
             for grp, cap in zip(groups, caps)]
    for parts in itertools.product(*pools):
        yield tuple(sorted(v for p in parts for v in p))


def fiber_symmetry(g: ColoredGraph, fiber, pointwise=()) -> Symmetry:
    """Aut(Γ, Σ) with the vertices in ``pointwise`` fixed one by one."""
    color = list(g.color)
    for v in fiber:
        color[v] = FIXED_COLOR + g.color[v]
    for k, v in enumerate(pointwise):
        color[v] = FIXED_COLOR + 10 * (k + 1) + g.color[v]
    return Symmetry(ColoredGraph(g.adjacency, color), g)


def _explicit_sort(graphs, fiber) -> list:
    seen = {}
    for g in graphs:
        cert = canonicalize(symmetry_graph(g, fiber)).certificate
        seen.setdefault(cert, g)
    return [seen[c] for c in sorted(seen)]


def _run(ext: Extender, result: DriverResult, g: ColoredGraph):
    res = ext.run()
    if res.budget_exceeded:
        result.budget_exceeded.append((g, res.budget_exceeded))
    return res


# ------------------------------------------------------------------ sections at a fiber

def sections_at_fiber(cfg: SearchConfig, workers: int = 1, level_cap: int | None = None,
                      level0: bool = True, checkpoint: str | None = None) -> DriverResult:
    """Sections at Σ level by level, then (if M is set) fiber components.

    Assumes every new section meets exactly one vertex of Σ and that the
    sections at a fixed vertex are pairwise disjoint.
    """
    t = cfg.fiber_type
    sigma = diagram(t)
    n = sigma.n
    table = cfg.pattern_table()
    pair = table.pair
    if pair is None:
        raise ValueError(f"no section bounds known for {t}")
    bij, bi0, _ = pair
    fiber = list(range(n))
    result = DriverResult()
    current = [sigma]
    last = n if level_cap is None else min(n, level_cap)
    for i in range(last):
        nxt = []
        runs = []
        for g in current:
            secs = sections_of(g, fiber)
            rho = {j: len(secs[j]) for j in range(i)}
            R = table.range(rho, [i], cfg.M_Sigma or 0)
            if not R:
                continue
            r_max = max(R)
            if r_max == 0:
                nxt.append(g)
                continue
            supports = set()
            for extra in bounded_subsets([secs[j] for j in range(i)], [bij[j][i] for j in range(i)]):
                supports.add(tuple(sorted((i,) + extra)))
            initial = [PseudoVertex.line(s) for s in sorted(supports)]
            ext = Extender(BaseData(g, cfg.degree), fiber_symmetry(g, fiber, fiber), initial,
                           m=cfg.m, fiber=t, mode="safe", r_max=r_max,
                           num=lambda h, i=i, R=R: len(sections_of(h, fiber)[i]) in R,
                           max_graphs=cfg.max_graphs, workers=workers, saturate_output=False,
                           checkpoint=None if checkpoint is None else f"{checkpoint}/L{i + 1}-{len(runs)}")
            res = _run(ext, result, g)
            runs.append(res.survivor_counts())
            nxt.extend(c.graph for c in res.plain)
        current = _explicit_sort(nxt, fiber)
        result.levels.append(LevelRecord(i + 1, len(runs), len(current), runs))
        log.info("level %d: %d graphs", i + 1, len(current))
    result.graphs = current
    if not level0 or cfg.M is None or last < n:
        return result
    # level 0: lines disjoint from Σ
    sats = []
    for g in current:
        secs = sections_of(g, fiber)
        initial = [PseudoVertex.line(s) for s in sorted(set(bounded_subsets(secs, bi0))) if s]
        M = cfg.M
        ext = Extender(BaseData(g, cfg.degree), fiber_symmetry(g, fiber), initial,
                       m=cfg.m, fiber=t, mode=cfg.mode, r_max=cfg.r_max,
                       num=lambda h: h.n >= M,
                       Num=lambda h: h.n >= M and is_sigma_graph(h, t, hyperbolic=False),
                       max_graphs=cfg.max_graphs, workers=workers)
        res = _run(ext, result, g)
        if cfg.r_max is not None and res.steps and res.steps[-1].r == cfg.r_max and res.steps[-1].survivors:
            # the algorithm has not terminated within the validity bound
            result.unsettled.append(g)
        sats.extend(res.saturated)
    result.levels.append(LevelRecord(0, len(current), len(sats)))
    result.saturated = ultimate_sort(sats)
    return result


# ------------------------------------------------------------------ large pencils

def _orbit_patterns(table) -> list:
    """All images of the stored patterns under Aut Σ (the pencil fixes the
    labelling of Σ, so lexicographic maximality cannot be assumed)."""
    auts = diagram_automorphisms(table.fiber)
    out = set()
    for p in table.patterns:
        for a in auts:
            q = [0] * len(p)
            for i, x in enumerate(p):
                q[a[i]] = x
            out.add(tuple(q))
    return sorted(out)


def _range(pats, rho: dict, i: int, M: int) -> set:
    return {p[i] for p in pats if all(p[j] == v for j, v in rho.items()) and sum(p) >= M}


def _pattern_max(generators, pattern, fiber) -> tuple:
    """Largest element of the orbit of a section count under G (acting on Σ)."""
    pos = {v: k for k, v in enumerate(fiber)}
    seen = {tuple(pattern)}
    frontier = [tuple(pattern)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = [0] * len(p)
                for k, v in enumerate(fiber):
                    q[pos[g[v]]] = p[k]
                q = tuple(q)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return max(seen)


def large_pencils(cfg: SearchConfig, pencil: ColoredGraph, fiber, workers: int = 1,
                  level_cap: int | None = None) -> DriverResult:
    """Simple sections of a maximal Σ-pencil Π, one vertex of Σ per level."""
    t = cfg.fiber_type
    fiber = list(fiber)
    view = pencil_of(pencil, fiber)
    table = cfg.pattern_table()
    if table.pair is None:
        raise ValueError(f"no section bounds known for {t}")
    bij = table.pair[0]
    pats = _orbit_patterns(table)
    kappa = fundamental_cycle(pencil, fiber)
    simple = [k for k in range(len(fiber)) if kappa[k] == 1]
    order = list(cfg.sigma) if cfg.sigma is not None else simple
    order = [k for k in order if k in simple]
    goal = (cfg.M or 0) - len(view.pencil)
    others = [(tt, vs) for tt, vs in view.fibers if set(vs) != set(fiber)]
    # simple sections meet one multiplicity-1 vertex of every other fiber
    fiber_choices = []
    for _, vs in others:
        k = fundamental_cycle(pencil, vs)
        fiber_choices.append([(v,) for v, c in zip(vs, k) if c == 1])
    elliptic_choices = [[()] + [(v,) for v in vs] for _, vs in view.elliptic]
    n_pi = len(view.pencil)

    def Num(h: ColoredGraph) -> bool:
        if not is_sigma_graph(h, t, hyperbolic=False):
            return False
        secs = sections_of(h, fiber)
        free = [v for v in disjoint_from(h, fiber) if h.color[v] == 1]
        return (len(free) == n_pi - len(fiber)
                and len({v for s in secs for v in s}) >= goal)

    result = DriverResult()
    current = [(pencil, None)]          # (graph, recorded Pat or None)
    carried = []
    last = len(order) if level_cap is None else min(len(order), level_cap)
    abort_on_stall = t == DiagramType("A", 2)
    for k in range(last):
        idx = order[k]
        a = fiber[idx]
        done = [fiber[j] for j in order[:k]]
        if k == 3 and carried:
            current = current + carried
            carried = []
        nxt, sats, runs = [], [], []
        for g, pat in current:
            secs = sections_of(g, fiber)
            rho = {order[j]: len(secs[order[j]]) for j in range(k)}
            R = _range(pats, rho, idx, goal)
            if not R:
                continue
            sym = fiber_symmetry(g, fiber, done + [a])
            base = BaseData(g, cfg.degree)
            progressive = k == len(order) - 1
            if not progressive and base.rank == 19:
                if abort_on_stall:
                    progressive = True
                elif pat is not None:
                    smin = min(R) - max(p[idx] for p in pat)
                    progressive = smin > 0
                    if not progressive and t == DiagramType("A", 3) and k < 3:
                        carried.append((g, pat))
                        continue
            supports = set()
            caps = [bij[order[j]][idx] for j in range(k)]
            for extra in bounded_subsets([secs[order[j]] for j in range(k)], caps):
                for fc in itertools.product(*fiber_choices, *elliptic_choices):
                    supports.add(tuple(sorted((a,) + extra + tuple(v for c in fc for v in c))))
            initial = [PseudoVertex.line(s) for s in sorted(supports)]
            ext = Extender(base, sym, initial, m=cfg.m, fiber=t,
                           mode="progressive" if progressive else "safe", r_max=max(R),
                           num=lambda h, idx=idx, R=R: len(sections_of(h, fiber)[idx]) in R,
                           Num=Num, max_graphs=cfg.max_graphs, workers=workers,
                           saturate_output=progressive)
            res = _run(ext, result, g)
            runs.append(res.survivor_counts())
            if progressive:
                sats.extend(res.saturated)
                continue
            gens = sym.generators
            for c in res.plain:
                pattern = [len(s) for s in sections_of(c.graph, fiber)]
                rec = None
                if c.rank == 19 and not abort_on_stall:
                    rec = {_pattern_max(gens, pattern, fiber)}
                    for s in ext.saturations(c):
                        rec.add(_pattern_max(gens, [len(x) for x in sections_of(s.plain, fiber)],
                                             fiber))
                nxt.append((c.graph, rec))
            if abort_on_stall and k == 1 and all(c.rank == base.rank for c in res.plain):
                raise UnsettledGraph("level 2 does not improve the rank")
        result.saturated.extend(sats)
        current = nxt
        result.levels.append(LevelRecord(k + 1, len(runs), len(nxt) + len(sats), runs))
        log.info("pencil level %d: %d graphs, %d saturations", k + 1, len(nxt), len(sats))
    result.graphs = [g for g, _ in current]
    result.saturated = ultimate_sort(result.saturated)
    return result
