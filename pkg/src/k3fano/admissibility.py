"""Isotropic obstructions, separating roots and the combined master test."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .graph import ColoredGraph
from .lattice import PolarizedLattice
from .vinberg import (RootSet, SeparatingRoot, WeylChamber, compatible_chamber,
                      fano_graph, find_separating_root)


class PrecondViolation(ValueError):
    pass


@dataclass(frozen=True)
class IsotropicClass:
    vector: tuple
    m: int
    in_closed_polyhedron: bool = False


@dataclass
class AdmissibilityReport:
    level_ok: dict = field(default_factory=dict)
    witness: tuple | None = None
    witness_kind: str | None = None      # "isotropic-m", "h-in-2S", "separating", "iota-separating"
    h_in_2S: bool = False

    @property
    def ok(self) -> bool:
        return self.witness_kind is None

    def describe(self) -> str:
        if self.ok:
            return "admissible and extensible"
        return f"{self.witness_kind}: {list(self.witness) if self.witness else ''}"


def isotropic_levels(degree: int, m: int) -> list:
    """Levels k ≤ m whose isotropic obstruction applies in this degree."""
    out = []
    for k in range(1, m + 1):
        if k == 1 or (k == 2 and degree >= 4) or (k == 3 and degree == 8):
            out.append(k)
    return out


def find_m_isotropic(S: PolarizedLattice, m: int, roots: RootSet | None = None):
    if roots is None or m not in roots.isotropic:
        roots = RootSet(S, iso_levels=(m,))
    vs = roots.isotropic[m]
    return IsotropicClass(vs[0], m) if vs else None


def h_divisible_by_two(S: PolarizedLattice) -> bool:
    return all(x % 2 == 0 for x in S.h)


def reflect(S: PolarizedLattice, v, r):
    c = S.inner(v, r)
    return tuple(a + c * b for a, b in zip(v, r))  # r² = −2: v − 2(v·r)/(r·r) r


def move_isotropic_to_polyhedron(S: PolarizedLattice, chamber: WeylChamber, iota,
                                 m: int | None = None, roots: RootSet | None = None):
    """Reflect ι by walls until it lies in the closed chamber."""
    iota = tuple(iota)
    if m is None:
        m = S.inner(iota, S.h)
    if roots is None:
        roots = RootSet(S, iso_levels=tuple(range(1, m)))
    for k in isotropic_levels(S.degree, m - 1):
        if roots.isotropic.get(k):
            raise PrecondViolation(f"lattice has a {k}-isotropic vector")
    gram = S.gram
    for _ in range(10 ** 6):
        bad = next((w for w in chamber.walls if la.dot(la.vecmat(w, gram), iota) < 0), None)
        if bad is None:
            return IsotropicClass(iota, m, True)
        iota = reflect(S, iota, bad)
    raise RuntimeError("reflection loop did not terminate")


@dataclass
class MasterResult:
    report: AdmissibilityReport
    chamber: WeylChamber | None = None
    graph: ColoredGraph | None = None
    extended: ColoredGraph | None = None
    roots: RootSet | None = None

    @property
    def ok(self) -> bool:
        return self.report.ok


def master_test(S: PolarizedLattice, gamma=(), m: int = 3, iota=None,
                extended: bool = True, functional=None, roots: RootSet | None = None) -> MasterResult:
    """Admissibility up to level m, h ∉ 2S, extensibility, then the Fano graph
    of the compatible chamber.  Stops at the first failure."""
    degree = S.degree
    levels = isotropic_levels(degree, m)
    if roots is None:
        roots = RootSet(S, iso_levels=tuple(levels))
    rep = AdmissibilityReport()
    rep.h_in_2S = h_divisible_by_two(S)
    for k in levels:
        vs = roots.isotropic[k]
        rep.level_ok[k] = not vs
        if vs:
            rep.witness, rep.witness_kind = vs[0], f"isotropic-{k}"
            return MasterResult(rep, roots=roots)
    if rep.h_in_2S and degree == 8 and m == 3:
        rep.witness, rep.witness_kind = tuple(x // 2 for x in S.h), "h-in-2S"
        return MasterResult(rep, roots=roots)
    gamma = [tuple(g) for g in gamma]
    ch = compatible_chamber(S, gamma, roots, iota, functional)
    if isinstance(ch, SeparatingRoot):
        rep.witness, rep.witness_kind = ch.root, ch.kind
        return MasterResult(rep, roots=roots)
    plain = fano_graph(S, ch, False, roots, iota, first=gamma)
    ext = fano_graph(S, ch, True, roots, iota, first=gamma) if extended else None
    return MasterResult(rep, ch, plain, ext, roots)
