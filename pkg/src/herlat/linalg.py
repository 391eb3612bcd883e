"""Exact integer and rational matrix algebra.

Matrices are plain lists of rows.  Entries are Python ints or
``fractions.Fraction``; both are arbitrary precision.  Lattices are given by
their basis rows (row convention: a lattice vector is ``c @ basis`` for an
integer row vector ``c``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from sympy import factorint

from .errors import NotASublattice, RankMismatch

Matrix = list  # list of rows


# -- small helpers ---------------------------------------------------------

def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> list[list[int]]:
    return [[0] * cols for _ in range(rows)]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)] if A else []


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col) if a and b) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x) if a and b) for row in A]


def vec_mat(x: Sequence, A: Sequence[Sequence]) -> list:
    n = len(A[0]) if A else 0
    out = [0] * n
    for xi, row in zip(x, A):
        if xi:
            for j, a in enumerate(row):
                if a:
                    out[j] += xi * a
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[c * a for a in row] for row in A]


def dot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y) if a and b)


def normalize(x):
    """Turn Fractions with denominator 1 into ints (cheaper arithmetic)."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def to_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def common_denominator(rows: Iterable[Sequence]) -> int:
    den = 1
    for row in rows:
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = lcm(den, x.denominator)
    return den


def scale_to_int(rows: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """Return (integer rows, den) with rows == integer rows / den."""
    den = common_denominator(rows)
    return [[int(x * den) for x in row] for row in rows], den


def is_integral_matrix(A) -> bool:
    return all(not isinstance(x, Fraction) or x.denominator == 1 for row in A for x in row)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# -- rational Gaussian elimination ----------------------------------------

def rref(A: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    M = [[to_fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis (as a list of vectors) of {x : A x = 0} over Q."""
    if not A:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, pivots = rref(A)
    n = len(A[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    aug = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution x of A x = b (None if inconsistent).  A may be non-square."""
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    n = len(A[0])
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = R[i][n]
    return x


def solve_left(B: Sequence[Sequence], v: Sequence) -> list[Fraction] | None:
    """Coordinates c with c @ B = v, or None when v is outside the row space."""
    return solve(transpose(B), v)


def det_int(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
        prev = pivot
    return sign * M[n - 1][n - 1]


def det(A: Sequence[Sequence]):
    """Exact determinant of a rational (or integer) square matrix."""
    n = len(A)
    if n == 0:
        return 1
    dens = [common_denominator([row]) for row in A]
    M = [[int(x * dd) for x in row] for row, dd in zip(A, dens)]
    total = 1
    for dd in dens:
        total *= dd
    return normalize(Fraction(det_int(M), total))


# -- Hermite and Smith normal forms ---------------------------------------

def hnf(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite normal form H and unimodular U with H = U M.

    Pivots are positive, entries above a pivot are reduced into [0, pivot)
    and zero rows are collected at the bottom.
    """
    H = [[int(x) for x in row] for row in M]
    rows = len(H)
    cols = len(H[0]) if rows else 0
    U = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        for s in range(r + 1, rows):
            b = H[s][c]
            if b == 0:
                continue
            a = H[r][c]
            if a == 0:
                H[r], H[s] = H[s], H[r]
                U[r], U[s] = U[s], U[r]
                continue
            if b % a == 0:
                q = b // a
                H[s] = [y - q * x for x, y in zip(H[r], H[s])]
                U[s] = [y - q * x for x, y in zip(U[r], U[s])]
                continue
            g, x, y = xgcd(a, b)
            p, q = -b // g, a // g
            H[r], H[s] = ([x * u + y * v for u, v in zip(H[r], H[s])],
                          [p * u + q * v for u, v in zip(H[r], H[s])])
            U[r], U[s] = ([x * u + y * v for u, v in zip(U[r], U[s])],
                          [p * u + q * v for u, v in zip(U[r], U[s])])
        piv = H[r][c]
        if piv == 0:
            continue
        if piv < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
            piv = -piv
        for s in range(r):
            q = H[s][c] // piv
            if q:
                H[s] = [y - q * x for x, y in zip(H[r], H[s])]
                U[s] = [y - q * x for x, y in zip(U[r], U[s])]
        r += 1
    return H, U


def row_lattice_basis(rows: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """HNF basis of the Z-span of integer rows (no transform; suits tall inputs).

    Vectors are inserted one at a time into an echelon basis and the basis is
    kept reduced so that entries stay small.
    """
    rows = [[int(x) for x in v] for v in rows]
    D = _full_rank_modulus(rows, ncols)
    if D is not None:
        # the span contains D Z^n: work modulo D, then add D e_k back
        rows = [[x % D for x in v] for v in rows]
        rows += [[D * int(k == c) for k in range(ncols)] for c in range(ncols)]
    piv: dict[int, list[int]] = {}
    for v in rows:
        c = next((k for k in range(ncols) if v[k]), None)
        while c is not None:
            h = piv.get(c)
            if h is None:
                if v[c] < 0:
                    v = [-x for x in v]
                piv[c] = v
                _reduce_above(piv, c)
                break
            a, b = h[c], v[c]
            if b % a == 0:
                q = b // a
                v = [y - q * x for x, y in zip(h, v)]
            else:
                g, x, y = xgcd(a, b)
                p, q = -b // g, a // g
                h, v = ([x * u + y * w for u, w in zip(h, v)],
                        [p * u + q * w for u, w in zip(h, v)])
                if D is not None:
                    h = h[:c + 1] + [x % D for x in h[c + 1:]]
                piv[c] = h
                _reduce_above(piv, c)
            if D is not None:
                v = [x % D for x in v]
            c = next((k for k in range(c + 1, ncols) if v[k]), None)
    cols = sorted(piv)
    for c in cols:
        _reduce_above(piv, c)
    return [piv[c] for c in cols]


MODULAR_PRIME = (1 << 61) - 1


def _full_rank_modulus(rows: list[list[int]], ncols: int) -> int | None:
    """A multiple D of the exponent of Z^n / span(rows), or None.

    Every nonsingular square subset has such a determinant, so the gcd over
    two subsets (picked front to back and back to front) is one too.
    """
    if len(rows) < ncols:
        return None
    first = _independent_det(rows, ncols, range(len(rows)))
    if first is None:
        return None
    second = _independent_det(rows, ncols, range(len(rows) - 1, -1, -1))
    return gcd(first, second) if second else first


def _independent_det(rows, ncols, order) -> int | None:
    p = MODULAR_PRIME
    echelon: dict[int, list[int]] = {}
    chosen = []
    for idx in order:
        v = rows[idx]
        w = [x % p for x in v]
        for c in sorted(echelon):
            if w[c]:
                f = w[c]
                w = [(a - f * b) % p for a, b in zip(w, echelon[c])]
        c = next((k for k in range(ncols) if w[k]), None)
        if c is None:
            continue
        inv = pow(w[c], -1, p)
        echelon[c] = [x * inv % p for x in w]
        chosen.append(idx)
        if len(chosen) == ncols:
            return abs(det_int([rows[i] for i in chosen]))
    return None


def _reduce_above(piv: dict[int, list[int]], c: int) -> None:
    # reduce every row whose pivot lies left of c modulo the pivot at c
    h = piv[c]
    p = h[c]
    for c2, row in piv.items():
        if c2 < c and not 0 <= row[c] < p:
            q = row[c] // p
            piv[c2] = [y - q * x for x, y in zip(h, row)]


def rational_lattice_basis(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Canonical HNF basis of the Z-span of rational rows."""
    rows = list(rows)
    if not rows:
        return []
    ints, den = scale_to_int(rows)
    H = row_lattice_basis(ints, ncols)
    if den == 1:
        return H
    return [[normalize(Fraction(x, den)) for x in row] for row in H]


def elementary_divisors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith invariants d_1 | d_2 | ... of an integer matrix."""
    A = [list(map(int, row)) for row in M]
    if not A or not A[0]:
        return []
    for _ in range(200):
        A, _ = hnf(A)
        A = [row for row in A if any(row)]
        At, _ = hnf(transpose(A))
        At = [row for row in At if any(row)]
        A = transpose(At)
        if all(A[i][j] == 0 for i in range(len(A)) for j in range(len(A[0])) if i != j):
            break
    diag = [abs(A[i][i]) for i in range(min(len(A), len(A[0]))) if A[i][i]]
    # enforce the divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = gcd(a, b)
            diag[i], diag[j] = g, a * b // g if g else 0
    return diag


# -- lattices -------------------------------------------------------------

@dataclass(frozen=True)
class ZLattice:
    """A Z-lattice in Q^n given by canonical HNF basis rows."""

    ambient_dim: int
    basis: tuple[tuple, ...]

    @classmethod
    def from_basis(cls, rows: Sequence[Sequence], ambient_dim: int | None = None) -> "ZLattice":
        rows = [list(r) for r in rows]
        n = ambient_dim if ambient_dim is not None else len(rows[0])
        H = rational_lattice_basis(rows, n)
        if len(H) != len(rows):
            raise RankMismatch("lattice generators are linearly dependent")
        return cls(n, tuple(tuple(r) for r in H))

    @classmethod
    def from_generators(cls, rows: Iterable[Sequence], ambient_dim: int) -> "ZLattice":
        H = rational_lattice_basis(list(rows), ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in H))

    @classmethod
    def standard(cls, n: int) -> "ZLattice":
        return cls(n, tuple(tuple(r) for r in identity(n)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def rows(self) -> list[list]:
        return [list(r) for r in self.basis]

    def scaled(self, c) -> "ZLattice":
        return ZLattice.from_basis([[c * x for x in r] for r in self.basis], self.ambient_dim)

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        return solve_left(self.basis, v)

    def contains(self, v: Sequence) -> bool:
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)


def coordinate_matrix(sup: ZLattice, sub: ZLattice) -> list[list[int]]:
    """Integer matrix C with C @ sup.basis = sub.basis."""
    if sub.rank != sup.rank:
        raise RankMismatch(f"ranks differ: {sub.rank} vs {sup.rank}")
    if sub.rank == 0:
        return []
    Bt = transpose(sup.basis)
    C = []
    for row in sub.basis:
        c = solve(Bt, row)
        if c is None or any(x.denominator != 1 for x in c):
            raise NotASublattice("sub is not contained in sup")
        C.append([int(x) for x in c])
    return C


def snf_index(sup: ZLattice, sub: ZLattice) -> int:
    """Group index [sup : sub] for sub of equal rank inside sup."""
    C = coordinate_matrix(sup, sub)
    out = 1
    for dv in elementary_divisors(C):
        out *= dv
    return out


def integer_left_kernel(A: Sequence[Sequence]) -> tuple[list[list[int]], list[list[int]]]:
    """Split Z^n for {c in Z^n : c A = 0}.

    Returns (kernel rows, complement rows); together they form a unimodular
    basis of Z^n with the kernel rows spanning the saturated kernel.
    """
    n = len(A)
    if n == 0:
        return [], []
    ints, _ = scale_to_int(A)
    if not ints[0]:
        return identity(n), []
    H, U = hnf(ints)
    r = sum(1 for row in H if any(row))
    return U[r:], U[:r]


def _smallest_prime_factor(n: int) -> int:
    return min(factorint(n))


def _left_kernel_vector_mod_p(rows: Sequence[Sequence[int]], p: int) -> list[int]:
    """A nonzero x (entries in (-p/2, p/2]) with x @ rows = 0 mod p."""
    k = len(rows)
    # columns of rows^T mod p, eliminated with row operations on [rows^T]
    M = [[rows[i][c] % p for i in range(k)] for c in range(len(rows[0]))]
    pivots = []
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][col], -1, p)
        M[r] = [v * inv % p for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col]:
                f = M[i][col]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
    free = next(c for c in range(k) if c not in pivots)
    x = [0] * k
    x[free] = 1
    for i, c in enumerate(pivots):
        x[c] = -M[i][free] % p
    return [v - p if v > p // 2 else v for v in x]


def saturated_kernel(A: Sequence[Sequence]) -> list[list[int]]:
    """A basis of {c in Z^n : c A = 0} with small entries (not in HNF).

    Starts from a rational nullspace basis and divides out one prime at a
    time until the row lattice is saturated.
    """
    n = len(A)
    if n == 0:
        return []
    if not A[0]:
        return identity(n)
    rows = []
    for v in nullspace(transpose(A), n):
        ints, _ = scale_to_int([v])
        g = 0
        for x in ints[0]:
            g = gcd(g, x)
        rows.append([x // g for x in ints[0]])
    while rows:
        top = elementary_divisors(rows)[-1]
        if top == 1:
            break
        p = _smallest_prime_factor(top)
        x = _left_kernel_vector_mod_p(rows, p)
        i = max(k for k, v in enumerate(x) if v)
        inv = pow(x[i], -1, p)
        x = [(v * inv) % p for v in x]
        x = [v - p if v > p // 2 else v for v in x]
        new = [sum(c * r[j] for c, r in zip(x, rows)) for j in range(len(rows[0]))]
        rows[i] = [v // p for v in new]
    return rows


def kernel_in_lattice(L: ZLattice, M: Sequence[Sequence]) -> ZLattice:
    """The saturated sublattice {x in L : x M = 0}."""
    A = mat_mul(L.basis, M) if M and M[0] else [[] for _ in L.basis]
    K = saturated_kernel(A)
    vecs = [vec_mat(c, L.basis) for c in K]
    return ZLattice.from_generators(vecs, L.ambient_dim)


def integral_solutions(A: Sequence[Sequence]) -> list[list]:
    """Z-basis (rows) of {x in Q^n : A x in Z^r} for A of full column rank.

    The solution set is the dual of the row lattice of A.
    """
    n = len(A[0])
    ints, den = scale_to_int(A)
    H = row_lattice_basis(ints, n)
    if len(H) != n:
        raise ValueError("constraint matrix does not have full column rank")
    Hinv = inverse(H)
    dual = [[den * x for x in row] for row in transpose(Hinv)]
    return rational_lattice_basis(dual, n)
