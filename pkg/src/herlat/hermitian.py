"""Instances, the skew-Hermitian form psi and the adapted norm.

Vectors of V = Q^n are column vectors for the D-action (``iota(a) @ x``) and
row vectors for lattices.  phi(x, y) = x^t Phi y.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import (AlgElem, Algebra, AlgebraKind, Involution, RealSplit,
                      norm_sq_D)
from .enumeration import FloatGram
from .errors import (AdjointNotInAlgebra, BoundViolation, DegenerateBlock,
                     GramSchmidtBreakdown, InvalidInstance)
from .linalg import (ZLattice, det, identity, inverse, is_integral_matrix,
                     kernel_in_lattice, mat_mul, mat_vec, normalize,
                     scale_to_int, snf_index, solve, transpose)

PIVOT_TOL = 1e-9
COVOL_TOL = 1e-6
CS_TOL = 1e-8


def _frozen(M) -> tuple[tuple, ...]:
    return tuple(tuple(normalize(Fraction(c)) for c in row) for row in M)


@dataclass(frozen=True, eq=False)
class Instance:
    """A lattice L in V = Q^n with symplectic phi and a D-action iota."""

    algebra: Algebra
    action: Mapping[str, tuple]
    phi: tuple[tuple[int, ...], ...]
    lattice: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "action", {k: _frozen(v) for k, v in self.action.items()})
        object.__setattr__(self, "phi", _frozen(self.phi))
        object.__setattr__(self, "lattice", _frozen(self.lattice))
        self._validate()

    # -- basic data -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.phi)

    @property
    def m(self) -> int:
        return self.n // self.algebra.dim

    @property
    def d(self) -> int:
        return self.algebra.d

    @property
    def e(self) -> int:
        return self.algebra.e

    @cached_property
    def lattice_zl(self) -> ZLattice:
        return ZLattice.from_basis(self.lattice, self.n)

    @cached_property
    def basis_action(self) -> list[list[list]]:
        """iota(b_k) for the algebra basis b_k, in basis order."""
        A = self.algebra
        n = self.n
        t = [list(r) for r in self.action["t"]]
        powers = [identity(n)]
        for _ in range(1, A.e):
            powers.append(mat_mul(t, powers[-1]))
        if A.kind is AlgebraKind.TYPE_I:
            return powers
        i = [list(r) for r in self.action["i"]]
        j = [list(r) for r in self.action["j"]]
        units = [identity(n), i, j, mat_mul(i, j)]
        return [mat_mul(powers[p], q) for q in units for p in range(A.e)]

    def iota(self, x: AlgElem) -> list[list]:
        n = self.n
        out = [[0] * n for _ in range(n)]
        for c, M in zip(x, self.basis_action):
            if c:
                for r in range(n):
                    row, src = out[r], M[r]
                    for s in range(n):
                        if src[s]:
                            row[s] += c * src[s]
        return out

    def act(self, x: AlgElem, v: Sequence) -> list:
        """iota(x) applied to the vector v."""
        out = [0] * self.n
        for c, M in zip(x, self.basis_action):
            if c:
                for r, val in enumerate(mat_vec(M, v)):
                    out[r] += c * val
        return [normalize(c) for c in out]

    def phi_eval(self, x: Sequence, y: Sequence):
        return normalize(sum(xi * sum(p * yj for p, yj in zip(row, y) if p and yj)
                             for xi, row in zip(x, self.phi) if xi))

    @cached_property
    def disc(self):
        """disc(L, phi) = det of the phi-Gram on the lattice basis."""
        B = [list(r) for r in self.lattice]
        return det(mat_mul(mat_mul(B, self.phi), transpose(B)))

    # -- validation -------------------------------------------------------

    def _validate(self):
        A = self.algebra
        n = self.n
        Phi = [list(r) for r in self.phi]
        if any(len(r) != n for r in Phi):
            raise InvalidInstance("phi must be square")
        if not is_integral_matrix(Phi):
            raise InvalidInstance("phi must have integer entries")
        if any(Phi[r][s] != -Phi[s][r] for r in range(n) for s in range(n)):
            raise InvalidInstance("phi is not skew-symmetric")
        if n == 0 or n % A.dim:
            raise InvalidInstance(f"dimension {n} is not a positive multiple of {A.dim}")
        if A.kind is AlgebraKind.TYPE_I and self.m % 2:
            raise InvalidInstance("type I needs an even number m of D-coordinates")
        needed = {"t"} if A.kind is AlgebraKind.TYPE_I else {"t", "i", "j"}
        if set(self.action) != needed:
            raise InvalidInstance(f"action must give exactly {sorted(needed)}")
        for name, M in self.action.items():
            if len(M) != n or any(len(r) != n for r in M):
                raise InvalidInstance(f"action matrix {name} has the wrong shape")
        if det(Phi) == 0:
            raise InvalidInstance("phi is degenerate")
        self._check_relations()
        if len(self.lattice) != n or any(len(r) != n for r in self.lattice):
            raise InvalidInstance("lattice must have n rows of length n")
        B = [list(r) for r in self.lattice]
        if det(B) == 0:
            raise InvalidInstance("lattice rows are linearly dependent")
        if not is_integral_matrix(mat_mul(mat_mul(B, Phi), transpose(B))):
            raise InvalidInstance("phi is not integral on the lattice")

    def _check_relations(self):
        A = self.algebra
        n = self.n
        t = [list(r) for r in self.action["t"]]
        f = A.field.minpoly
        acc = [[0] * n for _ in range(n)]
        for c in reversed(f):  # Horner
            acc = mat_mul(acc, t)
            for r in range(n):
                acc[r][r] += c
        if any(any(row) for row in acc):
            raise InvalidInstance("minpoly(iota(t)) != 0")
        if A.kind is AlgebraKind.TYPE_I:
            return
        i = [list(r) for r in self.action["i"]]
        j = [list(r) for r in self.action["j"]]
        ti = self.basis_action[: A.e]

        def field_elem(v):
            out = [[0] * n for _ in range(n)]
            for c, M in zip(v, ti):
                if c:
                    out = [[o + c * m for o, m in zip(ro, rm)] for ro, rm in zip(out, M)]
            return out

        def eq(X, Y):
            return all(x == y for rx, ry in zip(X, Y) for x, y in zip(rx, ry))

        if not eq(mat_mul(i, i), field_elem(A.a)):
            raise InvalidInstance("iota(i)^2 != iota(a)")
        if not eq(mat_mul(j, j), field_elem(A.b)):
            raise InvalidInstance("iota(j)^2 != iota(b)")
        ij, ji = mat_mul(i, j), mat_mul(j, i)
        if not eq(ij, [[-x for x in r] for r in ji]):
            raise InvalidInstance("iota(i) iota(j) != -iota(j) iota(i)")
        for g in (i, j):
            if not eq(mat_mul(t, g), mat_mul(g, t)):
                raise InvalidInstance("iota(t) is not central")

    # -- coordinate changes -----------------------------------------------

    def in_lattice_coordinates(self) -> "Instance":
        """Equivalent instance whose lattice is Z^n (coordinates in L's basis)."""
        return restrict_instance(self, self.lattice)


def restrict_instance(inst: Instance, rows: Sequence[Sequence]) -> Instance:
    """Instance on the Q-span of ``rows`` (a D-stable subspace) with lattice
    spanned by those rows, written in the coordinates they define."""
    P = [list(r) for r in rows]
    k = len(P)
    Pt = transpose(P)
    PPt_inv = inverse(mat_mul(P, Pt))
    action = {}
    for name, M in inst.action.items():
        MPt = mat_mul(M, Pt)
        Ap = mat_mul(PPt_inv, mat_mul(P, MPt))
        if not _mat_equal(mat_mul(Pt, Ap), MPt):
            raise InvalidInstance("subspace is not stable under the action")
        action[name] = Ap
    phi = mat_mul(mat_mul(P, inst.phi), Pt)
    return Instance(inst.algebra, action, phi, identity(k))


def _mat_equal(X, Y) -> bool:
    return all(x == y for rx, ry in zip(X, Y) for x, y in zip(rx, ry))


# -- involution ----------------------------------------------------------

def adjoint_involution(inst: Instance) -> Involution:
    """The involution with phi(a x, y) = phi(x, a^dagger y)."""
    A = inst.algebra
    n = inst.n
    Phi = [list(r) for r in inst.phi]
    Phi_inv = inverse(Phi)
    cols = [[M[r][s] for M in inst.basis_action] for r in range(n) for s in range(n)]
    images = {}
    for name, g in A.units().items():
        adj = mat_mul(mat_mul(Phi_inv, transpose(inst.iota(g))), Phi)
        rhs = [adj[r][s] for r in range(n) for s in range(n)]
        x = solve(cols, rhs)
        if x is None:
            raise AdjointNotInAlgebra(f"adjoint of iota({name}) is not in iota(D)")
        images[name] = tuple(normalize(c) for c in x)
    # dagger on basis elements t^p q  ->  q^dagger (t^dagger)^p
    tdag = images["t"]
    tpow = [A.one()]
    for _ in range(1, A.e):
        tpow.append(A.mul(tpow[-1], tdag))
    if A.kind is AlgebraKind.TYPE_I:
        qdag = [A.one()]
    else:
        idag, jdag = images["i"], images["j"]
        qdag = [A.one(), idag, jdag, A.mul(jdag, idag)]
    columns = [A.mul(q, tpow[p]) for q in qdag for p in range(A.e)]
    matrix = [[columns[k][r] for k in range(A.dim)] for r in range(A.dim)]
    return Involution.checked(A, matrix)


# -- the form psi --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SkewHermitianForm:
    """psi with Trd_{D/Q}(a psi(x, y)) = phi(a x, y) for all a in D.

    psi(x, y)_l = x^t Psi_l y where Psi_l = sum_k Tinv[l][k] iota(b_k)^t Phi.
    Each Psi_l is stored as an integer matrix and a denominator.
    """

    instance: Instance
    involution: Involution
    num: tuple = field(repr=False)
    den: tuple = field(repr=False)

    @property
    def algebra(self) -> Algebra:
        return self.instance.algebra

    def psi(self, x: Sequence, y: Sequence) -> AlgElem:
        out = []
        for N, dd in zip(self.num, self.den):
            acc = 0
            for xi, row in zip(x, N):
                if xi:
                    s = 0
                    for a, yj in zip(row, y):
                        if a and yj:
                            s += a * yj
                    if s:
                        acc += xi * s
            out.append(normalize(Fraction(acc, dd)) if isinstance(acc, int) else normalize(acc / dd))
        return tuple(out)

    def gram(self, vectors: Sequence[Sequence]) -> list[list[AlgElem]]:
        return [[self.psi(x, y) for y in vectors] for x in vectors]

    @cached_property
    def float_tensor(self) -> np.ndarray:
        return np.array([[[float(a) / dd for a in row] for row in N]
                         for N, dd in zip(self.num, self.den)])

    def psi_float(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,lij,j->l", x, self.float_tensor, y)


def build_psi(inst: Instance, inv: Involution) -> SkewHermitianForm:
    A = inst.algebra
    n = inst.n
    Tinv = A.trd_gram_inv
    Ak = [mat_mul(transpose(M), inst.phi) for M in inst.basis_action]
    nums, dens = [], []
    for l in range(A.dim):
        P = [[0] * n for _ in range(n)]
        for k in range(A.dim):
            c = Tinv[l][k]
            if c:
                for r in range(n):
                    row, src = P[r], Ak[k][r]
                    for s in range(n):
                        if src[s]:
                            row[s] += c * src[s]
        N, dd = scale_to_int(P)
        nums.append(tuple(tuple(r) for r in N))
        dens.append(dd)
    form = SkewHermitianForm(inst, inv, tuple(nums), tuple(dens))
    _check_form(form)
    return form


def _check_form(form: SkewHermitianForm, samples: int = 3, seed: int = 0) -> None:
    inst, A, inv = form.instance, form.algebra, form.involution
    n = inst.n
    # Trd o psi = phi on all basis pairs
    traces = [A.trd_q(b) for b in A.basis()]
    for r in range(n):
        for s in range(n):
            val = sum(Fraction(t * N[r][s], dd) for t, N, dd in zip(traces, form.num, form.den) if t)
            if val != inst.phi[r][s]:
                raise InvalidInstance("Trd o psi does not reproduce phi")
    rng = random.Random(seed)
    for _ in range(samples):
        x = [rng.randint(-3, 3) for _ in range(n)]
        y = [rng.randint(-3, 3) for _ in range(n)]
        a = A.random_element(rng, 3)
        b = A.random_element(rng, 3)
        pxy = form.psi(x, y)
        if form.psi(y, x) != A.neg(inv.apply(pxy)):
            raise AdjointNotInAlgebra("psi is not skew-Hermitian")
        lhs = form.psi(inst.act(a, x), inst.act(b, y))
        if lhs != A.mul(A.mul(a, pxy), inv.apply(b)):
            raise AdjointNotInAlgebra("psi is not sesquilinear")


# -- lattices and discriminants -------------------------------------------

def disc_trd_form(lat: ZLattice, form: SkewHermitianForm):
    """det of the phi-Gram on the lattice basis."""
    B = [list(r) for r in lat.basis]
    return det(mat_mul(mat_mul(B, form.instance.phi), transpose(B)))


def orth_complement(form: SkewHermitianForm, L: ZLattice, M: ZLattice) -> ZLattice:
    """{x in L : phi(w, x) = 0 for all w in M}."""
    Phi = form.instance.phi
    if M.rank == 0:
        return L
    # phi(w, x) = x Phi^t w^t, so x must be killed by Phi^t M^t
    cols = mat_mul(transpose(Phi), transpose(M.basis))
    perp = kernel_in_lattice(L, cols)
    dM = disc_trd_form(M, form)
    if dM != 0 and perp.rank + M.rank == L.rank:
        both = ZLattice.from_generators(list(M.basis) + list(perp.basis), L.ambient_dim)
        if snf_index(L, both) > abs(dM):
            raise BoundViolation("[L : M + M^perp] exceeds |disc M|")
    return perp


def r_module(inst: Instance, order_basis: Sequence[AlgElem], vectors: Sequence[Sequence]) -> ZLattice:
    """The Z-lattice R v_1 + ... + R v_k."""
    gens = [inst.act(r, v) for v in vectors for r in order_basis]
    return ZLattice.from_generators(gens, inst.n)


def disc_identity_sides(form: SkewHermitianForm, order_basis, disc_R, vectors, sigma):
    """Both sides of |disc(sum R v_i)| = d^{-d^2 e m}|disc R|^m prod |Nm psi(v_i, v_sigma(i))|."""
    inst, A = form.instance, form.algebra
    m = len(vectors)
    M = r_module(inst, order_basis, vectors)
    lhs = abs(disc_trd_form(M, form)) if M.rank == inst.d ** 2 * inst.e * m else None
    rhs = Fraction(abs(disc_R) ** m, A.d ** (A.dim * m))
    for i, j in enumerate(sigma):
        rhs *= abs(A.nm_q(form.psi(vectors[i], vectors[j])))
    return lhs, normalize(rhs)


# -- adapted norm --------------------------------------------------------

class _RealPicture:
    """Float helpers: D_R acting on V_R and psi with values in M_d(R)^e."""

    def __init__(self, form: SkewHermitianForm, split: RealSplit):
        self.form = form
        self.split = split
        inst = form.instance
        self.iota = np.array([[[float(c) for c in r] for r in M] for M in inst.basis_action])
        self.d = inst.d
        self.e = inst.e

    def psi(self, x, y) -> np.ndarray:
        return self.split.to_matrices(self.form.psi_float(x, y))

    def act(self, s: np.ndarray, z: np.ndarray) -> np.ndarray:
        c = self.split.from_matrices(s)
        return np.einsum("k,kij,j->i", c, self.iota, z)


def _weak_basis(form: SkewHermitianForm) -> list[list]:
    """Exact Gram-Schmidt over D.

    Type II: vectors with psi(v_k, v_l) = 0 for k != l and psi(v_k, v_k) != 0.
    Type I: pairs (v_1, v_2) with psi(v_1, v_2) = 1, other values 0.
    Pivots are taken in the order of the standard basis, so the result is
    deterministic.  D is a division algebra, so any nonzero value is a pivot.
    """
    inst, A = form.instance, form.algebra
    n = inst.n
    pool: list[list] = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    out: list[list] = []
    while pool:
        if A.kind is AlgebraKind.TYPE_II:
            v = _unitary_pivot(form, pool)
            s_inv = A.inv(form.psi(v, v))
            new = [v]
            proj = [_axpy(inst, A.neg(A.mul(form.psi(w, v), s_inv)), v, w) for w in pool]
        else:
            x, y = _symplectic_pair(form, pool)
            y = inst.act(A.inv(form.psi(x, y)), y)
            new = [x, y]
            proj = []
            for w in pool:
                w2 = _axpy(inst, A.neg(form.psi(w, y)), x, w)
                proj.append(_axpy(inst, form.psi(w, x), y, w2))
        out.extend(new)
        pool = _independent(proj, n - A.dim * len(out))
    return out


def _axpy(inst: Instance, a, v, w) -> list:
    """w + iota(a) v"""
    av = inst.act(a, v)
    return [x + y for x, y in zip(w, av)]


def _unitary_pivot(form: SkewHermitianForm, pool):
    A = form.algebra
    for z in pool:
        if any(form.psi(z, z)):
            return z
    for a, x in enumerate(pool):
        for y in pool[a + 1:]:
            if not any(form.psi(x, y)):
                continue
            # psi(x + u y, x + u y) = c u^dagger - u c^dagger with c = psi(x, y)
            for u in A.basis():
                z = _axpy(form.instance, u, y, x)
                if any(form.psi(z, z)):
                    return z
    raise GramSchmidtBreakdown("no vector with psi(z, z) != 0")


def _symplectic_pair(form: SkewHermitianForm, pool):
    for a, x in enumerate(pool):
        for y in pool[a + 1:]:
            if any(form.psi(x, y)):
                return x, y
    raise GramSchmidtBreakdown("no pair with psi(x, y) != 0")


def _independent(vectors, dim: int) -> list:
    """First ``dim`` linearly independent vectors, in order."""
    from .linalg import rank

    keep: list = []
    for v in vectors:
        if len(keep) == dim:
            break
        if any(v) and rank(keep + [v]) == len(keep) + 1:
            keep.append(v)
    return keep


def _adapted_pieces(form: SkewHermitianForm, split: RealSplit) -> list[tuple[float, list[list]]]:
    """The adapted Gram as sum alpha * N with exact rational N.

    A weak basis v_k is computed exactly over D; rescaling v_k by s_k in D_R
    makes it symplectic / unitary, and the norm is |sum b_k v_k|^2 =
    sum |b_k s_k|_D^2.  With Z the matrix of columns iota(basis_r) v_k the
    Gram is Z^{-t} diag(H_k) Z^{-1}; only the per-place weights of H_k are
    inexact.
    """
    inst, A, inv = form.instance, form.algebra, form.involution
    vs = _weak_basis(form)
    Z = transpose([inst.act(b, v) for v in vs for b in A.basis()])
    Zinv = inverse(Z)
    e, k = A.e, A.dim
    # C_q: coefficient q of Trd_{D/F}(b_r b_s^dagger)
    C = [[[A.trd_f(A.mul(br, inv.apply(bs)))[q] for bs in A.basis()] for br in A.basis()]
         for q in range(e)]
    roots = A.field.roots
    pieces = []
    for blk, v in enumerate(vs):
        if A.kind is AlgebraKind.TYPE_II:
            weights = np.abs(split.to_matrices(form.psi(v, v))[:, 0, 1])
        else:
            weights = np.ones(e)
        Y = Zinv[blk * k:(blk + 1) * k]
        for q in range(e):
            alpha = float(sum(w * roots[p] ** q for p, w in enumerate(weights)))
            if alpha:
                pieces.append((alpha, mat_mul(transpose(Y), mat_mul(C[q], Y))))
    return pieces


def adapted_norm(form: SkewHermitianForm, split: RealSplit, seed: int = 0,
                 check: bool = True) -> FloatGram:
    """Gram (in instance coordinates) of a norm on V_R adapted to psi."""
    n = form.instance.n
    G = np.zeros((n, n))
    for alpha, N in _adapted_pieces(form, split):
        G += alpha * np.array([[float(x) for x in row] for row in N])
    G = FloatGram(G)
    if check:
        _check_adapted(form, _RealPicture(form, split), G, seed)
    return G


def adapted_gram_integral(form: SkewHermitianForm, split: RealSplit) -> list[list[int]]:
    """A positive integer multiple of a rational approximation of the adapted Gram.

    Only the float weights are rounded, so the result stays positive
    definite however badly the coordinates are conditioned.
    """
    n = form.instance.n
    G = [[Fraction(0)] * n for _ in range(n)]
    for alpha, N in _adapted_pieces(form, split):
        a = Fraction(alpha)
        for r in range(n):
            for c in range(n):
                if N[r][c]:
                    G[r][c] += a * N[r][c]
    ints, _ = scale_to_int(G)
    return ints


def _check_adapted(form: SkewHermitianForm, rp: _RealPicture, G: FloatGram, seed: int) -> None:
    inst = form.instance
    B = np.array([[float(c) for c in r] for r in inst.lattice])
    covol_sq = float(np.linalg.det(B @ G.matrix @ B.T))
    disc = abs(float(inst.disc))
    if abs(covol_sq - disc) > COVOL_TOL * disc:
        raise GramSchmidtBreakdown(f"covolume check failed: {covol_sq} vs {disc}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        x = rng.standard_normal(inst.n)
        y = rng.standard_normal(inst.n)
        lhs = math.sqrt(float(np.sum(rp.psi(x, y) ** 2)))
        rhs = math.sqrt(G.norm_sq(x) * G.norm_sq(y))
        if lhs > rhs * (1 + CS_TOL):
            raise GramSchmidtBreakdown("|psi(x, y)|_D <= |x||y| fails")


def normalize_weak_basis(form: SkewHermitianForm, split: RealSplit,
                         basis: Sequence[Sequence]) -> list[np.ndarray]:
    """Per-place scalars s_i making {s_i^{-1} v_i} symplectic / unitary."""
    inst = form.instance
    rp = _RealPicture(form, split)
    vs = [np.array([float(c) for c in v]) for v in basis]
    de = inst.d * inst.e
    out: list[np.ndarray] = []
    if inst.d == 1:
        for k in range(0, len(vs), 2):
            p = rp.psi(vs[k], vs[k + 1])[:, 0, 0]
            if np.any(np.abs(p) < PIVOT_TOL):
                raise DegenerateBlock("pair value vanishes at some place")
            t = math.sqrt(float(np.sum(p * p))) / math.sqrt(de)
            out.append((p / math.sqrt(t)).reshape(inst.e, 1, 1))
            out.append(np.full((inst.e, 1, 1), math.sqrt(t)))
        return out
    for v in vs:
        s = rp.psi(v, v)[:, 0, 1]
        if np.any(np.abs(s) < PIVOT_TOL):
            raise DegenerateBlock("diagonal value vanishes at some place")
        mats = []
        for si in s:
            r = math.sqrt(abs(si))
            mats.append(np.diag([r, r]) if si >= 0 else np.diag([r, -r]))
        out.append(np.array(mats))
    return out


def psi_norm_sq(form: SkewHermitianForm, x, y):
    return norm_sq_D(form.algebra, form.psi(x, y), form.involution)
