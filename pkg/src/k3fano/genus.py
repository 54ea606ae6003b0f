"""Existence of even lattices with prescribed signature and discriminant form.

The discriminant form is always carried by a reference lattice M (q = q_M, or
q = −q_M).  Its p-adic data comes from a Jordan decomposition of M over Z_(p).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .lattice import IntLattice, _prime_factors


def valuation(x, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    return Fraction(x) / Fraction(p) ** valuation(x, p)


@dataclass(frozen=True)
class JordanBlock:
    scale: int          # p-adic valuation of the block's scale
    dim: int            # 1 or 2
    det: Fraction       # determinant of the block
    odd: bool           # 1×1 block (for p = 2: an odd Jordan constituent)


def jordan_decomposition(gram, p: int) -> list[JordanBlock]:
    """Jordan splitting of a non-degenerate Gram matrix over Z_(p).

    Blocks come out in non-decreasing scale.  For odd p every block is 1×1.
    """
    m = [[Fraction(x) for x in row] for row in gram]
    idx = list(range(len(m)))
    blocks = []
    while idx:
        best = None
        for a in idx:
            for b in idx:
                if b < a or m[a][b] == 0:
                    continue
                v = valuation(m[a][b], p)
                key = (v, a != b)
                if best is None or key < best[0]:
                    best = (key, a, b)
        if best is None:
            raise ValueError("degenerate form")
        (v, off), a, b = best
        if off and p != 2:
            # e_a += e_b makes the diagonal entry of minimal valuation
            for r in range(len(m)):
                m[a][r] += m[b][r]
            for r in range(len(m)):
                m[r][a] += m[r][b]
            off = False
        if not off:
            piv = m[a][a]
            blocks.append(JordanBlock(v, 1, piv, True))
            idx.remove(a)
            for k in idx:
                f = m[k][a] / piv
                if f:
                    for l in idx:
                        m[k][l] -= f * m[a][l]
            continue
        x, y, z = m[a][a], m[a][b], m[b][b]
        dt = x * z - y * y
        blocks.append(JordanBlock(v, 2, dt, False))
        idx.remove(a)
        idx.remove(b)
        # e_k -= (c_a, c_b) B⁻¹ (e_a, e_b)
        coeffs = {}
        for k in idx:
            ca, cb = m[k][a], m[k][b]
            coeffs[k] = ((ca * z - cb * y) / dt, (cb * x - ca * y) / dt)
        for k in idx:
            sa, sb = coeffs[k]
            for l in idx:
                m[k][l] -= sa * m[a][l] + sb * m[b][l]
    return blocks


@dataclass(frozen=True)
class LocalData:
    p: int
    length: int              # l(A_p)
    discr_k: Fraction        # determinant of the non-unimodular part
    scale2_odd: bool         # p = 2 only: scale-2 constituent is odd


def local_data(gram, p: int) -> LocalData:
    blocks = jordan_decomposition(gram, p)
    length = sum(b.dim for b in blocks if b.scale >= 1)
    dk = Fraction(1)
    for b in blocks:
        if b.scale >= 1:
            dk *= b.det
    scale2_odd = any(b.odd and b.scale == 1 for b in blocks)
    return LocalData(p, length, dk, scale2_odd)


def _legendre(u: Fraction, p: int) -> int:
    a = (u.numerator * pow(u.denominator, -1, p)) % p
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _mod8(u: Fraction) -> int:
    return (u.numerator * pow(u.denominator, -1, 8)) % 8


@dataclass(frozen=True)
class ExistenceVerdict:
    exists: bool
    reason: str
    signature_ok: bool = True
    failing_prime: int | None = None


def even_lattice_exists(t_plus: int, t_minus: int, carrier: IntLattice | list,
                        negate: bool = False) -> ExistenceVerdict:
    """Decide whether an even lattice of signature (t_plus, t_minus) exists with
    discriminant form q_M (or −q_M if ``negate``), where M is ``carrier``."""
    lat = carrier if isinstance(carrier, IntLattice) else IntLattice(carrier)
    gram = [list(r) for r in lat.gram]
    disc = lat.discriminant
    order = disc.order
    sp, sm, s0 = lat.signature
    if s0:
        raise ValueError("carrier lattice is degenerate")
    sign_q = (sm - sp) if negate else (sp - sm)
    if t_plus < 0 or t_minus < 0:
        return ExistenceVerdict(False, "negative inertia index", False)
    if (t_plus - t_minus - sign_q) % 8:
        return ExistenceVerdict(False, "signature is incompatible with the form mod 8", False)
    rank = t_plus + t_minus
    if rank < disc.length:
        return ExistenceVerdict(False, "rank is smaller than the length of the group", False)
    for p in _prime_factors(order):
        data = local_data(gram, p)
        if data.length != sum(1 for d in disc.orders if d % p == 0):
            raise AssertionError("Jordan decomposition disagrees with the Smith form")
        if data.length != rank:
            continue
        dk = data.discr_k * (-1) ** data.length if negate else data.discr_k
        lhs = Fraction((-1) ** t_minus * order)
        if p != 2:
            if _legendre(unit_part(lhs, p), p) != _legendre(unit_part(dk, p), p):
                return ExistenceVerdict(False, f"{p}-adic determinant condition fails",
                                        failing_prime=p)
        else:
            if data.scale2_odd:
                continue
            prod8 = (_mod8(unit_part(Fraction(order), 2)) * _mod8(unit_part(dk, 2))) % 8
            if prod8 not in (1, 7):
                return ExistenceVerdict(False, "2-adic determinant condition fails",
                                        failing_prime=2)
    return ExistenceVerdict(True, "all local conditions hold")
