"""Integral lattices given by Gram matrices: signatures, duals, discriminant
forms, finite-index overlattices, primitive hulls and short vectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, isqrt, prod

from . import linalg as la


class LatticeError(ValueError):
    pass


class DegenerateLattice(LatticeError):
    pass


class NotIsotropic(LatticeError):
    pass


class NotDefinite(LatticeError):
    pass


def _freeze(gram) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in gram)


@dataclass(frozen=True)
class IntLattice:
    """A lattice Zⁿ with an integral symmetric Gram matrix."""

    gram: tuple
    labels: tuple | None = None
    even: bool = field(default=True, compare=False)

    def __post_init__(self):
        g = _freeze(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        for i, row in enumerate(g):
            if len(row) != n:
                raise LatticeError(f"row {i} has length {len(row)}, expected {n}")
            for j in range(i):
                if row[j] != g[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
            if self.even and row[i] % 2:
                raise LatticeError(f"odd diagonal entry in row {i}")
        if self.labels is not None and len(self.labels) != n:
            raise LatticeError("label count does not match rank")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return la.det([list(r) for r in self.gram])

    @cached_property
    def inverse_gram(self):
        if self.det == 0:
            raise DegenerateLattice("degenerate Gram matrix")
        return la.inverse([list(r) for r in self.gram])

    @cached_property
    def signature(self) -> tuple[int, int, int]:
        return la.signature([list(r) for r in self.gram])

    def inner(self, u, v):
        return la.bilinear(u, self.gram, v)

    def norm(self, v):
        return la.bilinear(v, self.gram, v)

    def covector(self, v) -> list:
        """The products of ``v`` with the basis vectors."""
        return la.vecmat(v, self.gram)

    def contains(self, v) -> bool:
        return la.is_integral(v)

    def scaled(self, k: int) -> "IntLattice":
        return IntLattice([[k * x for x in row] for row in self.gram], self.labels, even=self.even)

    @cached_property
    def discriminant(self) -> "DiscriminantGroup":
        return DiscriminantGroup.of(self)


def inertia_indices(lat: IntLattice | list) -> tuple[int, int, int]:
    gram = lat.gram if isinstance(lat, IntLattice) else lat
    return la.signature([list(r) for r in gram])


@dataclass(frozen=True)
class PolarizedLattice:
    lattice: IntLattice
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(int(x) for x in self.h))
        if len(self.h) != self.lattice.rank:
            raise LatticeError("polarization has wrong length")

    @property
    def degree(self) -> int:
        return self.lattice.norm(self.h)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def gram(self):
        return self.lattice.gram

    def inner(self, u, v):
        return self.lattice.inner(u, v)

    def is_hyperbolic(self) -> bool:
        sp, _, s0 = self.lattice.signature
        return sp == 1 and s0 == 0 and self.degree > 0


# ------------------------------------------------------------------ discriminant

class DiscriminantGroup:
    """L∨/L as ⊕ Z/dᵢ with the induced forms q (mod 2Z) and b (mod Z)."""

    def __init__(self, lattice: IntLattice, orders, lifts, coord_rows):
        self.lattice = lattice
        self.orders = tuple(orders)
        self.lifts = [tuple(v) for v in lifts]
        self._rows = coord_rows

    @classmethod
    def of(cls, lat: IntLattice) -> "DiscriminantGroup":
        if lat.det == 0:
            raise DegenerateLattice("discriminant of a degenerate lattice")
        g = [list(r) for r in lat.gram]
        diag, u, v = la.smith(g)
        ug = la.matmul(u, g)
        orders, lifts, rows = [], [], []
        for i, d in enumerate(diag):
            d = abs(d)
            if d > 1:
                orders.append(d)
                lifts.append([la.normalize(Fraction(v[k][i], d)) for k in range(lat.rank)])
                rows.append(ug[i])
        return cls(lat, orders, lifts, rows)

    def __len__(self) -> int:
        return prod(self.orders)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def length(self) -> int:
        return len(self.orders)

    def element(self, x) -> tuple:
        """Group coordinates of a dual vector (L coordinates)."""
        out = []
        for row, d in zip(self._rows, self.orders):
            y = la.dot(row, x)
            y = Fraction(y)
            if y.denominator != 1:
                raise LatticeError("vector is not in the dual lattice")
            out.append(y.numerator % d)
        return tuple(out)

    def lift(self, e) -> list:
        v = [Fraction(0)] * self.lattice.rank
        for c, lv in zip(e, self.lifts):
            if c:
                for k, x in enumerate(lv):
                    v[k] += c * x
        return [la.normalize(x) for x in v]

    def zero(self) -> tuple:
        return (0,) * len(self.orders)

    def add(self, a, b) -> tuple:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def scale(self, k: int, a) -> tuple:
        return tuple((k * x) % d for x, d in zip(a, self.orders))

    def q(self, e) -> Fraction:
        v = self.lift(e)
        return Fraction(self.lattice.norm(v)) % 2

    def b(self, e, f) -> Fraction:
        return Fraction(self.lattice.inner(self.lift(e), self.lift(f))) % 1

    def element_order(self, e) -> int:
        o = 1
        for x, d in zip(e, self.orders):
            o = la.lcm(o, d // gcd(x, d))
        return o

    def elements(self):
        for e in product(*(range(d) for d in self.orders)):
            yield tuple(e)

    def torsion_basis(self, p: int) -> list:
        """F_p-basis of the p-torsion subgroup."""
        out = []
        for i, d in enumerate(self.orders):
            if d % p == 0:
                e = [0] * len(self.orders)
                e[i] = d // p
                out.append(tuple(e))
        return out

    def prime_order_subgroups(self, p: int):
        """One generator for each subgroup of order p."""
        basis = self.torsion_basis(p)
        k = len(basis)
        for coeffs in product(range(p), repeat=k):
            nz = next((c for c in coeffs if c), 0)
            if nz != 1:
                continue  # normalize: first nonzero coefficient equals 1
            e = self.zero()
            for c, g in zip(coeffs, basis):
                if c:
                    e = self.add(e, self.scale(c, g))
            yield e

    def span(self, gens) -> frozenset:
        group = {self.zero()}
        frontier = [self.zero()]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in group:
                        group.add(y)
                        new.append(y)
            frontier = new
        return frozenset(group)

    def primes(self) -> list:
        return sorted({p for d in self.orders for p in _prime_factors(d)})


def _prime_factors(n: int) -> list:
    out, p = [], 2
    n = abs(n)
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def discriminant(lat: IntLattice) -> DiscriminantGroup:
    return lat.discriminant


# ------------------------------------------------------------------ extensions

@dataclass(frozen=True)
class Kernel:
    """Generators of an overlattice L' ⊇ L, as rational vectors in L coordinates."""

    generators: tuple = ()

    def __post_init__(self):
        gens = tuple(tuple(la.normalize(Fraction(x)) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)

    def __bool__(self):
        return any(not la.is_integral(g) for g in self.generators)

    def __add__(self, other: "Kernel") -> "Kernel":
        return Kernel(self.generators + other.generators)

    def mapped(self, fn) -> "Kernel":
        return Kernel(tuple(fn(g) for g in self.generators))


@dataclass(frozen=True)
class Extension:
    """An overlattice: ``basis`` rows are its basis in the old coordinates."""

    lattice: IntLattice
    basis: tuple
    index: int

    @cached_property
    def _inv(self):
        return la.inverse([list(r) for r in self.basis])

    def coords(self, v) -> tuple:
        """Map a vector in old coordinates to new coordinates."""
        return tuple(la.solve_left(v, None, self._inv))

    def old(self, w) -> tuple:
        return tuple(la.normalize(x) for x in la.vecmat(w, self.basis))


def extend_by_kernel(lat: IntLattice, kernel: Kernel, check: bool = True) -> Extension:
    """The overlattice generated by ``lat`` and the kernel vectors."""
    n = lat.rank
    gens = [list(g) for g in kernel.generators]
    if check:
        for g in gens:
            for w in la.vecmat(g, lat.gram):
                if Fraction(w).denominator != 1:
                    raise NotIsotropic("kernel vector is not in the dual lattice")
            if Fraction(lat.norm(g)) % 2 != 0:
                raise NotIsotropic("kernel vector has non-zero q-value")
    rows = la.identity(n) + gens
    basis = la.row_lattice_basis(rows)
    new_gram = la.congruent(basis, [list(r) for r in lat.gram])
    for i, row in enumerate(new_gram):
        for x in row:
            if Fraction(x).denominator != 1:
                raise NotIsotropic("kernel is not isotropic: non-integral products")
        if Fraction(row[i]) % 2:
            raise NotIsotropic("kernel is not isotropic: odd vector")
    index = 1 / Fraction(abs(la.det(basis)))
    assert index.denominator == 1
    return Extension(IntLattice(new_gram, even=lat.even), tuple(tuple(r) for r in basis), int(index))


def primitive_hull(lat: IntLattice, generators) -> Extension:
    """(Q·generators) ∩ L with its basis in L coordinates."""
    gens = [list(g) for g in generators]
    n = lat.rank
    if not gens or la.rank(gens) == 0:
        return Extension(IntLattice([]), (), 1)
    rref, piv = la.row_echelon(gens)
    if len(piv) == n:
        basis = la.identity(n)
    else:
        # integer vectors annihilated by the complement of the span
        ann = la.left_nullspace_q(la.transpose(rref))  # vectors y with rref·y = 0
        basis = la.integer_left_kernel(la.transpose(ann))
        basis = la.hermite(basis)
        basis = [r for r in basis if any(r)]
    gram = la.congruent(basis, [list(r) for r in lat.gram])
    return Extension(IntLattice(gram, even=lat.even), tuple(tuple(r) for r in basis), 1)


def radical_quotient(gram):
    """Split off the radical of a (possibly degenerate) integral Gram matrix.

    Returns ``(lattice, basis, projection)`` where ``basis`` rows are integer
    vectors spanning a complement of the radical and ``projection`` maps a free
    coordinate vector to its image coordinates (rows of an N×r matrix).
    """
    g = [list(r) for r in gram]
    n = len(g)
    h, u = la.hermite(g, transform=True)
    keep = [i for i, row in enumerate(h) if any(row)]
    rad = [i for i, row in enumerate(h) if not any(row)]
    order = keep + rad
    u2 = [u[i] for i in order]
    uinv = la.inverse(u2)
    r = len(keep)
    basis = [u2[i] for i in range(r)]
    proj = [[la.normalize(x) for x in row[:r]] for row in uinv]
    lat_gram = la.congruent(basis, g)
    return IntLattice(lat_gram), basis, proj


# ------------------------------------------------------------- short vectors

def _enumerate(g, bound: int):
    """Integer Fincke–Pohst: all nonzero x (one of ±x) with xᵀgx ≤ bound.

    Yields (x, norm) in the coordinates of ``g``.
    """
    n = len(g)
    mu, d = la.ldl(g)
    den = []
    coef = []
    for i in range(n):
        di = 1
        for j in range(i + 1, n):
            di = la.lcm(di, mu[i][j].denominator)
        den.append(di)
        coef.append([int(mu[i][j] * di) for j in range(n)])
    wq = [d[i] / (den[i] * den[i]) for i in range(n)]
    scale = 1
    for w in wq:
        scale = la.lcm(scale, w.denominator)
    w = [int(x * scale) for x in wq]
    top = bound * scale
    x = [0] * n
    out = []

    def rec(i, rem, all_zero):
        di, ci, wi = den[i], coef[i], w[i]
        c = 0
        for j in range(i + 1, n):
            if x[j]:
                c += ci[j] * x[j]
        t = isqrt(rem // wi)
        lo = -((t + c) // di)
        hi = (t - c) // di
        if all_zero:
            lo = max(lo, 0)
        for v in range(lo, hi + 1):
            z = di * v + c
            r = rem - wi * z * z
            if r < 0:
                continue
            x[i] = v
            if i == 0:
                if not (all_zero and v == 0):
                    out.append((tuple(x), (top - r) // scale))
            else:
                rec(i - 1, r, all_zero and v == 0)
        x[i] = 0

    if n:
        rec(n - 1, top, True)
    return out


def short_vectors(gram, bound: int) -> list:
    """All nonzero v with v·v ≤ bound, one per ± pair (first nonzero coordinate
    positive), as (vector, norm), sorted lexicographically by coordinates."""
    g = [list(r) for r in (gram.gram if isinstance(gram, IntLattice) else gram)]
    n = len(g)
    if n == 0:
        return []
    for i in range(n):
        if g[i][i] <= 0:
            raise NotDefinite("Gram matrix is not positive definite")
    try:
        t, red = la.lll_gram(g)
    except (ZeroDivisionError, ValueError):
        raise NotDefinite("Gram matrix is not positive definite") from None
    try:
        raw = _enumerate(red, bound)
    except ValueError:
        raise NotDefinite("Gram matrix is not positive definite") from None
    out = []
    for y, nm in raw:
        v = la.vecmat(y, t)
        first = next(c for c in v if c)
        if first < 0:
            v = [-c for c in v]
        out.append((tuple(v), nm))
    out.sort()
    return out


def vectors_of_norm(gram, s: int) -> list:
    """All v with v·v = s (both signs), sorted lexicographically."""
    vs = [v for v, nm in short_vectors(gram, s) if nm == s]
    full = vs + [tuple(-c for c in v) for v in vs]
    full.sort()
    return full
