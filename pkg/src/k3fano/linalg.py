"""Exact matrix arithmetic over Z and Q.

Matrices are lists of rows; entries are ``int`` or ``Fraction``.  Nothing here
touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

Matrix = list


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else 0


def denominator_lcm(rows) -> int:
    d = 1
    for row in rows:
        for x in row:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
    return d


def to_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def normalize(x):
    """Return an int when a Fraction is integral."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v, a: Matrix) -> list:
    n = len(a[0]) if a else 0
    out = [0] * n
    for x, row in zip(v, a):
        if x:
            for j, y in enumerate(row):
                out[j] += x * y
    return out


def matvec(a: Matrix, v) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def bilinear(u, gram: Matrix, v):
    return dot(vecmat(u, gram), v)


def congruent(a: Matrix, b: Matrix) -> Matrix:
    """Return ``a · b · aᵀ``."""
    return matmul(matmul(a, b), transpose(a))


def is_integral(v) -> bool:
    return all(not isinstance(x, Fraction) or x.denominator == 1 for x in v)


def as_ints(v) -> tuple:
    return tuple(int(x) for x in v)


def det(a: Matrix):
    """Determinant; fraction-free Bareiss elimination for integer input."""
    n = len(a)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in a for x in row):
        d = denominator_lcm(a)
        return Fraction(det([[int(x * d) for x in row] for row in a]), d ** n)
    m = [list(row) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def row_echelon(a: Matrix):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [[to_fraction(x) for x in row] for row in a]
    rows, cols = len(m), (len(m[0]) if m else 0)
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[:r], pivots


def rank(a: Matrix) -> int:
    return len(row_echelon(a)[1]) if a else 0


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    rref, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [[normalize(x) for x in row[n:]] for row in rref]


def solve_left(v, a: Matrix, a_inv: Matrix | None = None) -> list:
    """Solve ``x · a = v`` for square invertible ``a``."""
    if a_inv is None:
        a_inv = inverse(a)
    return [normalize(x) for x in vecmat(v, a_inv)]


def left_nullspace_q(a: Matrix) -> Matrix:
    """Basis over Q of {x : x·a = 0}."""
    at = transpose(a)
    rref, piv = row_echelon(at)
    n = len(a)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(rref, piv):
            x[p] = -row[f]
        basis.append(x)
    return basis


# ---------------------------------------------------------------- integer forms

def _ext_gcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite(a: Matrix, transform: bool = False):
    """Row-style Hermite normal form of an integer matrix.

    Returns ``h`` (same shape, nonzero rows first) or ``(h, u)`` with
    ``u · a = h`` and ``u`` unimodular.
    """
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    u = identity(rows) if transform else None
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # gcd-combine column c into row r
        for i in range(r + 1, rows):
            if m[i][c] == 0:
                continue
            if m[r][c] == 0:
                m[r], m[i] = m[i], m[r]
                if transform:
                    u[r], u[i] = u[i], u[r]
                continue
            g, x, y = _ext_gcd(m[r][c], m[i][c])
            p, q = m[r][c] // g, m[i][c] // g
            ri, rr = m[i], m[r]
            m[r] = [x * s + y * t for s, t in zip(rr, ri)]
            m[i] = [p * t - q * s for s, t in zip(rr, ri)]
            if transform:
                ui, ur = u[i], u[r]
                u[r] = [x * s + y * t for s, t in zip(ur, ui)]
                u[i] = [p * t - q * s for s, t in zip(ur, ui)]
        if m[r][c] == 0:
            continue
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
            if transform:
                u[r] = [-x for x in u[r]]
        piv = m[r][c]
        for i in range(r):
            f = m[i][c] // piv
            if f:
                m[i] = [s - f * t for s, t in zip(m[i], m[r])]
                if transform:
                    u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return (m, u) if transform else m


def row_lattice_basis(rows: Matrix) -> Matrix:
    """Z-basis (HNF rows) of the lattice spanned by rational row vectors."""
    if not rows:
        return []
    d = denominator_lcm(rows)
    ints = [[int(x * d) for x in row] for row in rows]
    h = hermite(ints)
    basis = [row for row in h if any(row)]
    if d == 1:
        return basis
    return [[normalize(Fraction(x, d)) for x in row] for row in basis]


def integer_left_kernel(a: Matrix) -> Matrix:
    """Z-basis of {x ∈ Zⁿ : x·a = 0} (a saturated sublattice)."""
    if not a:
        return []
    d = denominator_lcm(a)
    ints = [[int(x * d) for x in row] for row in a]
    h, u = hermite(ints, transform=True)
    return [u[i] for i, row in enumerate(h) if not any(row)]


def smith(a: Matrix):
    """Smith normal form of a square integer matrix.

    Returns ``(diag, u, v)`` with ``u · a · v`` diagonal with entries ``diag``,
    each dividing the next, and ``u``, ``v`` unimodular.
    """
    n = len(a)
    m = [list(row) for row in a]
    u, v = identity(n), identity(n)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        # bring the smallest nonzero entry of the trailing block to (t, t)
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return [m[i][i] for i in range(n)], u, v
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = m[t][t]
            dirty = False
            for i in range(t + 1, n):
                q = m[i][t] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if m[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = m[t][j] // p
                if q:
                    for row in m:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if m[t][j]:
                    dirty = True
            if dirty:
                continue
            # divisibility of the trailing block by the pivot
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if m[i][j] % p), None)
            if bad is None:
                break
            m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
            u[t] = [x + y for x, y in zip(u[t], u[bad[0]])]
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
    return [m[i][i] for i in range(n)], u, v


# ------------------------------------------------------------ symmetric forms

def diagonalize(gram: Matrix) -> list:
    """Diagonal entries of a rational congruence diagonalization."""
    m = [[to_fraction(x) for x in row] for row in gram]
    n = len(m)
    out = []
    active = list(range(n))
    while active:
        k = next((i for i in active if m[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j] != 0), None)
            if pair is None:
                out.extend([Fraction(0)] * len(active))
                break
            i, j = pair
            # e_i + e_j has square 2·m[i][j] ≠ 0
            for r in range(n):
                m[i][r] += m[j][r]
            for r in range(n):
                m[r][i] += m[r][j]
            k = i
        piv = m[k][k]
        out.append(piv)
        active.remove(k)
        for i in active:
            f = m[i][k] / piv
            if f:
                for j in active:
                    m[i][j] -= f * m[k][j]
        for i in active:
            m[i][k] = m[k][i] = Fraction(0)
    return out


def signature(gram: Matrix) -> tuple[int, int, int]:
    d = diagonalize(gram)
    return (sum(1 for x in d if x > 0), sum(1 for x in d if x < 0), sum(1 for x in d if x == 0))


def ldl(gram: Matrix):
    """LDLᵀ of a positive definite matrix: returns (mu, diag) with
    Q(x) = Σ_i diag[i] (x_i + Σ_{j>i} mu[i][j] x_j)²."""
    n = len(gram)
    q = [[to_fraction(x) for x in row] for row in gram]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    mu = [[q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return mu, [q[i][i] for i in range(n)]


def lll_gram(gram: Matrix, delta: Fraction = Fraction(3, 4)):
    """LLL on a positive definite integral Gram matrix, in integer
    arithmetic (Cohen's integral variant, tracking only inner products).

    Returns ``(t, g)``: rows of ``t`` are the reduced basis in old coordinates
    and ``g = t · gram · tᵀ``.
    """
    n = len(gram)
    g = [[int(x) for x in row] for row in gram]
    t = identity(n)
    if n <= 1:
        return t, g
    dn, dd = delta.numerator, delta.denominator
    lam = [[0] * n for _ in range(n)]
    d = [1] + [0] * n            # d[i + 1] belongs to vector i
    d[1] = g[0][0]

    def reduce(k, l):
        q2 = 2 * lam[k][l]
        if abs(q2) <= d[l + 1]:
            return
        q = (q2 + d[l + 1]) // (2 * d[l + 1])
        t[k] = [x - q * y for x, y in zip(t[k], t[l])]
        for j in range(n):
            g[k][j] -= q * g[l][j]
        for j in range(n):
            g[j][k] = g[k][j] if j != k else g[j][k]
        g[k][k] -= q * g[l][k]
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        t[k], t[k - 1] = t[k - 1], t[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        b = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            tt = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * tt) // d[k]
            lam[i][k - 1] = (b * tt + lm * lam[i][k]) // d[k + 1]
        d[k] = b

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = g[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ValueError("Gram matrix is not positive definite")
                    d[k + 1] = u
        while True:
            reduce(k, k - 1)
            # Lovász: d_k d_{k-2} ≥ (δ d_{k-1}² − λ²) in integral form
            if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lam[k][k - 1] ** 2:
                swap(k, kmax)
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    reduce(k, l)
                k += 1
                break
    return t, g


def isqrt_floor(x: Fraction) -> int:
    """Largest integer s with s² ≤ x (x ≥ 0)."""
    return isqrt(x.numerator // x.denominator) if x >= 0 else -1
