"""Orders in D: stabilizers, discriminants, duals, eta and omega."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

import numpy as np

from .algebra import AlgElem, Algebra, AlgebraKind, Involution, antisym_basis, norm_sq_D
from .enumeration import lll_gram, _enumerate
from .errors import InternalBoundViolation, InvalidInstance, TypeMismatch
from .hermitian import Instance
from .linalg import (ZLattice, det, integer_left_kernel, integral_solutions,
                     inverse, mat_mul, normalize, rational_lattice_basis, snf_index,
                     solve_left, transpose)


@dataclass(frozen=True)
class DLattice:
    """A Z-lattice inside D, stored by the HNF of its coordinate rows."""

    algebra: Algebra
    basis: tuple[AlgElem, ...]

    @classmethod
    def from_generators(cls, A: Algebra, gens: Sequence[AlgElem]) -> "DLattice":
        rows = rational_lattice_basis([list(g) for g in gens], A.dim)
        return cls(A, tuple(tuple(normalize(Fraction(c)) for c in r) for r in rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def zlattice(self) -> ZLattice:
        return ZLattice(self.algebra.dim, self.basis)

    def coordinates(self, x: AlgElem):
        return solve_left(self.basis, x)

    def contains(self, x: AlgElem) -> bool:
        c = self.coordinates(x)
        return c is not None and all(v.denominator == 1 for v in c)


@dataclass(frozen=True)
class Order(DLattice):
    """A full-rank Z-lattice in D that is a subring containing 1."""

    def __post_init__(self):
        A = self.algebra
        if self.rank != A.dim:
            raise InvalidInstance("order must have full rank")
        if not self.contains(A.one()):
            raise InvalidInstance("order must contain 1")
        for x in self.basis:
            for y in self.basis:
                if not self.contains(A.mul(x, y)):
                    raise InvalidInstance("lattice is not closed under multiplication")

    @classmethod
    def from_generators(cls, A: Algebra, gens: Sequence[AlgElem]) -> "Order":
        lat = DLattice.from_generators(A, gens)
        return cls(A, lat.basis)

    @cached_property
    def disc(self) -> int:
        return order_disc(self)


def stabilizer_order(inst: Instance) -> Order:
    """{a in D : iota(a) L within L}."""
    A = inst.algebra
    B = [list(r) for r in inst.lattice]
    Bt = transpose(B)
    Bt_inv = inverse(Bt)
    # iota(a) L within L  <=>  B^{-t} iota(a) B^t is integral
    mats = [mat_mul(Bt_inv, mat_mul(M, Bt)) for M in inst.basis_action]
    n = inst.n
    rows = [[M[r][s] for M in mats] for r in range(n) for s in range(n)]
    rows = [r for r in rows if any(r)]
    sol = integral_solutions(rows)
    return Order(A, tuple(tuple(normalize(Fraction(c)) for c in r) for r in sol))


def order_disc(R: DLattice) -> int:
    """det of the non-reduced trace form Tr_{D/Q}(r_i r_j) on R's basis."""
    A = R.algebra
    G = [[A.tr_q(A.mul(x, y)) for y in R.basis] for x in R.basis]
    return normalize(det(G))


def dual_lattice(R: DLattice) -> DLattice:
    """R* = {a : Trd_{D/Q}(a r) in Z for all r in R}."""
    A = R.algebra
    T = A.trd_gram
    # a . T . r^t integral for every basis r  ->  a in rows of (T R^t)^{-1}
    TR = mat_mul(T, transpose(R.basis))
    rows = inverse(TR)
    dual = DLattice.from_generators(A, [tuple(r) for r in rows])
    expected = Fraction(abs(order_disc(R)), A.d ** A.dim)
    if Fraction(snf_index(dual.zlattice(), R.zlattice())) != expected:
        raise InternalBoundViolation("[R* : R] differs from d^{-d^2 e}|disc R|")
    return dual


def eta_min(R: Order, inv: Involution) -> int:
    """Least eta >= 1 with eta R^dagger within R."""
    eta = 1
    for r in R.basis:
        c = R.coordinates(inv.apply(r))
        for v in c:
            eta = lcm(eta, v.denominator)
    return eta


def intersection_with_center(R: Order) -> DLattice:
    """R cap F, via the coordinates that must vanish."""
    A = R.algebra
    cols = [[r[k] for k in range(A.e, A.dim)] for r in R.basis]
    if not cols[0]:
        return R
    K, _ = integer_left_kernel(cols)
    gens = []
    for c in K:
        gens.append(tuple(sum(ci * r[k] for ci, r in zip(c, R.basis)) for k in range(A.dim)))
    return DLattice.from_generators(A, gens)


def omega_lattice(R: Order, inv: Involution) -> DLattice:
    """Omega = {w in D^- : w R* within R and R* w within R}."""
    A = R.algebra
    if A.kind is not AlgebraKind.TYPE_II:
        raise TypeMismatch("omega is only defined for type II algebras")
    U = antisym_basis(inv)
    dual = dual_lattice(R)
    Rinv = inverse([list(r) for r in R.basis])  # coordinates: x . Rinv
    rows = []
    for s in dual.basis:
        for side in (0, 1):
            prods = [A.mul(u, s) if side == 0 else A.mul(s, u) for u in U]
            coords = [mat_mul([list(p)], Rinv)[0] for p in prods]
            for k in range(A.dim):
                rows.append([c[k] for c in coords])
    rows = [r for r in rows if any(r)]
    sol = integral_solutions(rows)
    gens = [tuple(normalize(sum(Fraction(c) * u[k] for c, u in zip(y, U))) for k in range(A.dim))
            for y in sol]
    return DLattice.from_generators(A, gens)


def omega_bound_squared(e: int, eta: int, disc_R: int):
    """(2^-4 e^{1/2} eta^7 |disc R|^{2/e})^2 as a PowerBound."""
    from .bounds import PowerBound

    return PowerBound.of([(Fraction(1, 256), 1), (e, 1), (eta, 14), (abs(disc_R), Fraction(4, e))])


def omega_short(R: Order, inv: Involution, eta: int) -> AlgElem:
    """A shortest nonzero element of the omega lattice."""
    from .bounds import compare_power_bound

    A = R.algebra
    Om = omega_lattice(R, inv)
    B = [list(b) for b in Om.basis]
    G = [[A.trd_q(A.mul(x, inv.apply(y))) for y in Om.basis] for x in Om.basis]
    Gf = np.array([[float(c) for c in row] for row in G])
    T, Gr = lll_gram(Gf)
    cands: list[tuple[int, ...]] = []

    def visit(x, p):
        cands.append(tuple(int(v) for v in np.array(x, dtype=object) @ np.array(T, dtype=object)))
        return p * (1 + 1e-9)

    _enumerate(Gr, float(np.min(np.diag(Gr))) * (1 + 1e-9), visit)
    best = None
    for c in cands:
        w = tuple(normalize(sum(ci * b[k] for ci, b in zip(c, B))) for k in range(A.dim))
        key = (norm_sq_D(A, w, inv), _sign_key(c))
        if best is None or key < best[0]:
            best = (key, w, c)
    _, w, c = best
    if _sign_key(c) != tuple(c):
        w = A.neg(w)
    if not compare_power_bound(norm_sq_D(A, w, inv), omega_bound_squared(A.e, eta, R.disc)):
        raise InternalBoundViolation("omega exceeds its length bound")
    return w


def _sign_key(c):
    for v in c:
        if v:
            return tuple(c) if v > 0 else tuple(-x for x in c)
    return tuple(c)


def endo_order(inst: Instance, R: Order) -> tuple[list[list[list]], int]:
    """Z-basis of End_R(L) and its discriminant.

    Maps are written in lattice coordinates (column convention).  The
    discriminant uses the trace form tr(f g) of the maps acting on V.
    """
    from .bounds import PowerBound, compare_power_bound

    A = inst.algebra
    lc = inst.in_lattice_coordinates()
    n = lc.n
    m = lc.m
    # a D-basis v_1..v_m chosen greedily from the standard basis
    vs: list[list[int]] = []
    span: list[list] = []
    from .linalg import rank as _rank

    for k in range(n):
        v = [int(i == k) for i in range(n)]
        trial = span + [lc.act(b, v) for b in A.basis()]
        if _rank(trial) == len(span) + A.dim:
            vs.append(v)
            span = trial
        if len(vs) == m:
            break
    # P has columns iota(b_r) v_k ordered (k, r)
    P = transpose([lc.act(b, v) for v in vs for b in A.basis()])
    Pinv = inverse(P)
    maps = []
    for k in range(m):
        for l in range(m):
            for c in A.basis():
                Rc = A.right_matrix(c)
                F = [[0] * n for _ in range(n)]
                for r in range(A.dim):
                    for s in range(A.dim):
                        F[l * A.dim + r][k * A.dim + s] = Rc[r][s]
                maps.append(mat_mul(mat_mul(P, F), Pinv))
    rows = [[M[r][s] for M in maps] for r in range(n) for s in range(n)]
    rows = [r for r in rows if any(r)]
    sol = integral_solutions(rows)
    basis = []
    for y in sol:
        f = [[0] * n for _ in range(n)]
        for c, M in zip(y, maps):
            if c:
                for r in range(n):
                    for s in range(n):
                        if M[r][s]:
                            f[r][s] += c * M[r][s]
        basis.append([[normalize(x) for x in row] for row in f])
    G = [[_trace_prod(f, g) for g in basis] for f in basis]
    disc = normalize(det(G))
    bound = PowerBound.of([(abs(R.disc), (A.dim * m + 1) * m * m)])
    if not compare_power_bound(abs(disc), bound):
        raise InternalBoundViolation("|disc End_R(L)| exceeds |disc R|^{(d^2 e m + 1) m^2}")
    return basis, disc


def _trace_prod(f, g):
    return sum(f[r][s] * g[s][r] for r in range(len(f)) for s in range(len(f)) if f[r][s] and g[s][r])
