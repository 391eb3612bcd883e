"""Floating-point short vector search: Gram-matrix LLL plus enumeration.

LLL only preconditions the basis; enumeration then completes the search up
to the requested radius, so the results do not depend on LLL quality.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EnumerationBudgetExceeded
from .linalg import ZLattice, identity, nullspace, scale_to_int

DEFAULT_BUDGET = 10**7
RADIUS_SLACK = 1 + 2.0**-20
TIE_TOL = 1e-9


@dataclass(frozen=True)
class FloatGram:
    """A symmetric positive definite Gram matrix in double precision."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        G = np.array(self.matrix, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("Gram matrix must be square")
        G = (G + G.T) / 2
        np.linalg.cholesky(G)  # raises LinAlgError unless positive definite
        G.setflags(write=False)
        object.__setattr__(self, "matrix", G)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def norm_sq(self, x: Sequence) -> float:
        v = np.asarray(x, dtype=float)
        return float(v @ self.matrix @ v)

    def restrict(self, rows: Sequence[Sequence]) -> "FloatGram":
        """Gram of the given ambient vectors (rows)."""
        B = np.array([[float(x) for x in r] for r in rows])
        return FloatGram(B @ self.matrix @ B.T)


def hermite_bound(n: int) -> int:
    """The bound gamma_n <= n used in place of the Hermite constant."""
    return n


def lll_gram(G: np.ndarray, delta: float = 0.99) -> tuple[list[list[int]], np.ndarray]:
    """LLL-reduce the lattice with Gram matrix G.

    Returns an integer unimodular T (rows = new basis in old coordinates) and
    the reduced Gram T G T^t.
    """
    G = np.array(G, dtype=float)
    n = G.shape[0]
    T = identity(n)
    if n <= 1:
        return T, G
    mu = np.zeros((n, n))
    r = np.zeros(n)

    def gso_row(k):
        for j in range(k):
            mu[k, j] = (G[k, j] - np.dot(mu[j, :j] * mu[k, :j], r[:j])) / r[j]
        r[k] = G[k, k] - np.dot(mu[k, :k] ** 2, r[:k])

    def row_op(k, j, q):
        # b_k <- b_k - q b_j
        T[k] = [a - q * b for a, b in zip(T[k], T[j])]
        G[k, :] -= q * G[j, :]
        G[:, k] -= q * G[:, j]

    def swap(k):
        T[k], T[k - 1] = T[k - 1], T[k]
        G[[k, k - 1], :] = G[[k - 1, k], :]
        G[:, [k, k - 1]] = G[:, [k - 1, k]]

    r[0] = G[0, 0]
    k = 1
    iterations = 0
    while k < n:
        iterations += 1
        if iterations > 100000:
            break
        if k == 1:
            r[0] = G[0, 0]
        gso_row(k)
        for _ in range(8):
            changed = False
            for j in range(k - 1, -1, -1):
                q = round(mu[k, j])
                if q:
                    row_op(k, j, q)
                    mu[k, :j] -= q * mu[j, :j]
                    mu[k, j] -= q
                    changed = True
            if not changed:
                break
            gso_row(k)
        if r[k] < (delta - mu[k, k - 1] ** 2) * r[k - 1]:
            swap(k)
            k = max(k - 1, 1)
        else:
            k += 1
    return T, G


def lll_gram_exact(G: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Integral LLL on an integer positive definite Gram matrix.

    All arithmetic is exact (the subdeterminants d_i and the scaled
    Gram-Schmidt coefficients stay integral), so this works for lattices
    whose Gram matrix is too ill-conditioned for double precision.
    Returns the unimodular transformation T.
    """
    n = len(G)
    Gm = [[int(x) for x in row] for row in G]
    T = identity(n)
    if n <= 1:
        return T
    p, q = delta.numerator, delta.denominator
    d = [1] + [0] * n  # d[i] for the first i vectors (1-based below)
    lam = [[0] * (n + 1) for _ in range(n + 1)]

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            c = (2 * lam[k][l] + d[l]) // (2 * d[l])
            T[k - 1] = [a - c * b for a, b in zip(T[k - 1], T[l - 1])]
            for j in range(n):
                Gm[k - 1][j] -= c * Gm[l - 1][j]
            for j in range(n):
                Gm[j][k - 1] -= c * Gm[j][l - 1]
            lam[k][l] -= c * d[l]
            for i in range(1, l):
                lam[k][i] -= c * lam[l][i]

    def swap(k, kmax):
        T[k - 1], T[k - 2] = T[k - 2], T[k - 1]
        Gm[k - 1], Gm[k - 2] = Gm[k - 2], Gm[k - 1]
        for row in Gm:
            row[k - 1], row[k - 2] = row[k - 2], row[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    d[1] = Gm[0][0]
    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = Gm[k - 1][j - 1]
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ValueError("Gram matrix is not positive definite")
                    d[k] = u
        while True:
            red(k, k - 1)
            if q * d[k] * d[k - 2] < p * d[k - 1] ** 2 - q * lam[k][k - 1] ** 2:
                swap(k, kmax)
                k = max(2, k - 1)
            else:
                for l in range(k - 2, 0, -1):
                    red(k, l)
                k += 1
                break
    return T


def _enumerate(G: np.ndarray, bound: float, visit: Callable[[list[int], float], float],
               outer: int = 0, budget: int = DEFAULT_BUDGET) -> None:
    """Visit every nonzero x (up to sign) with x G x^t <= bound.

    Coordinates outer..n-1 are required to be not all zero.  ``visit`` may
    return a smaller bound to shrink the search.  The sign is fixed by making
    the last nonzero coordinate positive.
    """
    n = G.shape[0]
    L = np.linalg.cholesky(G)
    R = L.T
    q = [float(R[i, i] ** 2) for i in range(n)]
    mu = [[float(R[i, j] / R[i, i]) if j > i else 0.0 for j in range(n)] for i in range(n)]
    x = [0] * n
    state = {"bound": bound, "nodes": 0}

    def rec(i: int, partial: float, all_zero_above: bool):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise EnumerationBudgetExceeded(f"more than {budget} enumeration nodes")
        if i == outer - 1 and all_zero_above:
            return
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n) if x[j])
        rem = state["bound"] - partial
        if rem < 0:
            return
        half = math.sqrt(rem / q[i])
        lo = math.ceil(c - half)
        hi = math.floor(c + half)
        if all_zero_above:
            lo = max(lo, 0)
        if lo > hi:
            return
        for v in _zigzag(c, lo, hi):
            p = partial + q[i] * (v - c) ** 2
            if p > state["bound"]:
                break
            x[i] = v
            if i == 0:
                if not (all_zero_above and v == 0):
                    nb = visit(list(x), p)
                    if nb is not None:
                        state["bound"] = min(state["bound"], nb)
            else:
                rec(i - 1, p, all_zero_above and v == 0)
        x[i] = 0

    rec(n - 1, 0.0, True)


def _zigzag(c: float, lo: int, hi: int):
    """Integers in [lo, hi] by nondecreasing distance from c."""
    m = min(max(int(round(c)), lo), hi)
    yield m
    up, down = m + 1, m - 1
    while up <= hi or down >= lo:
        if up <= hi and (down < lo or up - c <= c - down):
            yield up
            up += 1
        else:
            yield down
            down -= 1


def _canonical_sign(v: list[int]) -> tuple[int, ...]:
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return tuple(v)


def _order_with_ties(items: list[tuple[float, tuple[int, ...]]]):
    """Sort by norm, breaking near-ties by descending coordinates (e_1 before e_2)."""
    items.sort(key=lambda t: t[0])
    out = []
    i = 0
    while i < len(items):
        j = i + 1
        while j < len(items) and items[j][0] <= items[i][0] * (1 + TIE_TOL) + 1e-300:
            j += 1
        out.extend(sorted(items[i:j], key=lambda t: t[1], reverse=True))
        i = j
    return out


def lattice_gram(L: ZLattice, G: FloatGram) -> np.ndarray:
    B = np.array([[float(x) for x in r] for r in L.basis])
    return B @ G.matrix @ B.T


def short_vectors(L: ZLattice, G: FloatGram, radius: float,
                  budget: int = DEFAULT_BUDGET) -> list[tuple[tuple[int, ...], float]]:
    """All nonzero v in L (one per sign pair) with |v|^2 <= radius*(1+2^-20).

    Returns (coordinates in L's basis, norm squared) pairs in canonical order.
    """
    Gl = lattice_gram(L, G)
    T, Gr = lll_gram(Gl)
    Tm = np.array(T, dtype=object)
    found: list[tuple[float, tuple[int, ...]]] = []

    def visit(x, p):
        coords = [int(c) for c in np.array(x, dtype=object) @ Tm]
        coords = list(_canonical_sign(coords))
        v = np.array(coords, dtype=float)
        found.append((float(v @ Gl @ v), tuple(coords)))
        if len(found) > budget:
            raise EnumerationBudgetExceeded("too many short vectors")
        return None

    _enumerate(Gr, radius * RADIUS_SLACK, visit, budget=budget)
    return [(c, nrm) for nrm, c in _order_with_ties(found)]


def shortest_outside(Gl: np.ndarray, subspace: Sequence[Sequence],
                     budget: int = DEFAULT_BUDGET) -> tuple[tuple[int, ...], float]:
    """Shortest vector of Z^n (Gram Gl) outside the Q-span W of ``subspace`` rows.

    Z^n is split into a basis of Z^n cap W and a complement; the enumeration
    then requires a nonzero complement coordinate.  Membership in W is
    decided exactly through an integral annihilator.
    """
    n = Gl.shape[0]
    sub = [list(r) for r in subspace]
    if sub:
        N = nullspace(sub, n)
        if not N:
            raise ValueError("subspace already spans everything")
        ann, _ = scale_to_int([list(col) for col in zip(*N)])  # x in W iff x @ ann == 0
    else:
        ann = None

    def inside(v) -> bool:
        return ann is not None and not any(
            sum(a * r[c] for a, r in zip(v, ann) if a) for c in range(len(ann[0])))

    split = _split_basis(Gl, ann, inside) if ann is not None else ([], identity(n))
    found: list[tuple[float, tuple[int, ...]]] = []
    if split is None:
        # no clean split: enumerate all of Z^n and filter
        T, Gp = lll_gram(Gl)
        k = 0
        start = min(Gp[i, i] for i in range(n) if not inside(T[i]))
    else:
        ins, comp = split
        k = len(ins)
        T1 = lll_gram(_gram_rows(Gl, ins))[0] if k else []
        Gc = _gram_rows(Gl, comp)
        if k:
            Gx = _rows_f(comp) @ Gl @ _rows_f(ins).T
            Gc = Gc - Gx @ np.linalg.solve(_gram_rows(Gl, ins), Gx.T)
        T2 = lll_gram(Gc)[0]
        T = [list(r) for r in (_apply(T1, ins) + _apply(T2, comp))]
        Gp = _rows_f(T) @ Gl @ _rows_f(T).T
        Gp = (Gp + Gp.T) / 2
        start = min(Gp[i, i] for i in range(k, n))
    Tm = np.array(T, dtype=object)

    def visit(x, p):
        coords = [int(c) for c in np.array(x, dtype=object) @ Tm]
        if inside(coords):
            return None
        coords = _canonical_sign(coords)
        v = np.array(coords, dtype=float)
        nrm = float(v @ Gl @ v)
        found.append((nrm, coords))
        return nrm * (1 + TIE_TOL)

    _enumerate(Gp, start * (1 + TIE_TOL), visit, outer=k, budget=budget)
    best = min(f[0] for f in found)
    ties = [f for f in found if f[0] <= best * (1 + TIE_TOL)]
    nrm, coords = min(ties, key=lambda t: t[1])
    return coords, nrm


def _rows_f(rows) -> np.ndarray:
    return np.array([[float(x) for x in r] for r in rows])


def _gram_rows(Gl: np.ndarray, rows) -> np.ndarray:
    B = _rows_f(rows)
    G = B @ Gl @ B.T
    return (G + G.T) / 2


def _apply(T, rows) -> list[list[int]]:
    return [[sum(c * r[j] for c, r in zip(t, rows) if c) for j in range(len(rows[0]))] for t in T]


def _split_basis(Gl: np.ndarray, ann, inside):
    """Unimodular basis of Z^n whose first rows span Z^n cap W, or None.

    LLL under Gl plus a heavy penalty on the annihilator coordinates pushes
    vectors of W to the front.  If exactly dim W rows of the reduced basis
    lie in W, those rows are a basis of Z^n cap W (the basis is unimodular
    and the remaining rows are independent modulo W).
    """
    n = Gl.shape[0]
    A = _rows_f(ann)
    A = A / np.linalg.norm(A, axis=0)
    k = n - A.shape[1]
    scale = float(np.max(np.diag(Gl)))
    for exp in (4, 8):
        T, _ = lll_gram(Gl + scale * 10.0**exp * (A @ A.T))
        ins = [t for t in T if inside(t)]
        if len(ins) == k:
            return ins, [t for t in T if not inside(t)]
    return None
