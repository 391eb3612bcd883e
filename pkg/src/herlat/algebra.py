"""Arithmetic in type I (totally real field) and type II (quaternion) algebras.

Elements are tuples of rationals.  For a field of degree e the basis of a
type II algebra is ordered quaternion-major::

    1, t, ..., t^(e-1), i, t i, ..., j, t j, ..., ij, t ij, ...

so coordinates ``x[q*e:(q+1)*e]`` hold the F-coefficient of the q-th
quaternion unit.  Type I algebras use the power basis of F.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidParameters, NotPositive, SplitFailure, ZeroDivisor
from .linalg import det, inverse, mat_mul, mat_vec, nullspace, normalize, solve

AlgElem = tuple  # tuple of Fraction / int coordinates

SPLIT_TOL = 1e-9
ROOT_WIDTH = Fraction(1, 10**12)


# -- polynomials over Q (ascending coefficient lists) ----------------------

def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_deriv(p):
    return [k * p[k] for k in range(1, len(p))]


def _poly_rem(a, b):
    a = [Fraction(c) for c in a]
    b = _poly_trim(b)
    while len(_poly_trim(a)) >= len(b):
        a = _poly_trim(a)
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, c in enumerate(b):
            a[shift + k] -= f * c
        a = _poly_trim(a)
        if not a:
            break
    return _poly_trim(a)


def _sturm_chain(p):
    chain = [list(map(Fraction, p)), list(map(Fraction, _poly_deriv(p)))]
    while True:
        r = _poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x):
    signs = [s for s in (_sign(_poly_eval(p, x)) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign(v):
    return (v > 0) - (v < 0)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.extend({k, n // k})
        k += 1
    return sorted(out)


def is_irreducible(coeffs: Sequence[int]) -> bool:
    """Irreducibility over Q of a monic integer polynomial of degree <= 4."""
    f = list(coeffs)
    e = len(f) - 1
    if e > 4:
        raise InvalidParameters("irreducibility check limited to degree <= 4")
    if e <= 1:
        return e == 1
    if f[0] == 0:
        return False
    # monic: rational roots are integer divisors of the constant term
    for r in _divisors(f[0]):
        if _poly_eval(f, r) == 0 or _poly_eval(f, -r) == 0:
            return False
    if e <= 3:
        return True
    # degree 4 with no root: look for (x^2+px+q)(x^2+rx+s)
    c0, c1, c2, c3 = f[0], f[1], f[2], f[3]
    for q in _divisors(c0) + [-k for k in _divisors(c0)]:
        s = c0 // q
        # p + r = c3, p r = c2 - q - s
        disc = c3 * c3 - 4 * (c2 - q - s)
        if disc < 0:
            continue
        root = math.isqrt(disc)
        if root * root != disc or (c3 + root) % 2:
            continue
        for p in {(c3 + root) // 2, (c3 - root) // 2}:
            r = c3 - p
            if p * s + q * r == c1:
                return False
    return True


@dataclass(frozen=True)
class NumberField:
    """A totally real number field Q[t]/(f) with isolated real roots."""

    minpoly: tuple[int, ...]
    enclosures: tuple[tuple[Fraction, Fraction], ...] = field(repr=False)
    roots: tuple[float, ...] = field(repr=False)

    @classmethod
    def from_minpoly(cls, coeffs: Sequence[int]) -> "NumberField":
        f = tuple(int(c) for c in coeffs)
        if len(f) < 2 or f[-1] != 1:
            raise InvalidParameters("minimal polynomial must be monic of degree >= 1")
        if not is_irreducible(f):
            raise InvalidParameters(f"polynomial {list(f)} is reducible over Q")
        encl = _isolate_real_roots(f)
        if len(encl) != len(f) - 1:
            raise InvalidParameters("field is not totally real")
        roots = tuple(float((a + b) / 2) for a, b in encl)
        return cls(f, tuple(encl), roots)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def one(self):
        return (1,) + (0,) * (self.degree - 1)

    def zero(self):
        return (0,) * self.degree

    def generator(self):
        """The element t (for degree 1 this is the rational root of f)."""
        if self.degree == 1:
            return (normalize(Fraction(-self.minpoly[0])),)
        return (0, 1) + (0,) * (self.degree - 2)

    def mul(self, x, y):
        e = self.degree
        if e == 1:
            return (normalize(x[0] * y[0]),)
        prod = [0] * (2 * e - 1)
        for a, xa in enumerate(x):
            if xa:
                for b, yb in enumerate(y):
                    if yb:
                        prod[a + b] += xa * yb
        f = self.minpoly
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if c:
                for i in range(e):
                    prod[k - e + i] -= c * f[i]
        return tuple(normalize(c) for c in prod[:e])

    @cached_property
    def _power_traces(self):
        # Tr(t^k) for k < e via the companion matrix
        e = self.degree
        C = self.mult_matrix(self.generator())
        out, P = [], [[int(i == j) for j in range(e)] for i in range(e)]
        for _ in range(e):
            out.append(sum(P[i][i] for i in range(e)))
            P = mat_mul(C, P)
        return out

    def mult_matrix(self, x):
        """Matrix of y -> x y on the power basis (column convention)."""
        e = self.degree
        cols = []
        for k in range(e):
            unit = tuple(int(i == k) for i in range(e))
            cols.append(self.mul(x, unit))
        return [[cols[k][i] for k in range(e)] for i in range(e)]

    def trace(self, x):
        return normalize(sum(c * t for c, t in zip(x, self._power_traces)))

    def norm(self, x):
        return det(self.mult_matrix(x))

    def inv(self, x):
        sol = solve(self.mult_matrix(x), self.one())
        if sol is None:
            raise ZeroDivisionError("zero has no inverse")
        return tuple(normalize(c) for c in sol)

    def embed(self, x, place: int) -> float:
        r = self.roots[place]
        return float(sum(float(c) * r**k for k, c in enumerate(x)))


def _isolate_real_roots(f):
    chain = _sturm_chain(f)
    bound = 1 + max(abs(Fraction(c)) for c in f[:-1])
    lo, hi = -bound, bound
    pending = [(lo, hi)]
    isolated = []
    while pending:
        a, b = pending.pop()
        count = _sign_changes(chain, a) - _sign_changes(chain, b)
        if count == 0:
            continue
        if count == 1:
            isolated.append((a, b))
            continue
        mid = (a + b) / 2
        if _poly_eval(f, mid) == 0:
            # rational root would contradict irreducibility for degree > 1
            isolated.append((mid, mid))
        pending.extend([(a, mid), (mid, b)])
    out = []
    for a, b in isolated:
        while b - a > ROOT_WIDTH:
            mid = (a + b) / 2
            fm = _poly_eval(f, mid)
            if fm == 0:
                a = b = mid
                break
            if _sign(_poly_eval(f, a)) * _sign(fm) <= 0:
                b = mid
            else:
                a = mid
        out.append((a, b))
    return sorted(out)


class AlgebraKind(Enum):
    TYPE_I = "I"
    TYPE_II = "II"


@dataclass(frozen=True)
class Algebra:
    kind: AlgebraKind
    field: NumberField
    a: tuple | None = None
    b: tuple | None = None

    def __post_init__(self):
        if self.kind is AlgebraKind.TYPE_II:
            e = self.field.degree
            if self.a is None or self.b is None or len(self.a) != e or len(self.b) != e:
                raise InvalidParameters("type II needs a and b as F-coordinate vectors")
            if not any(self.a) or not any(self.b):
                raise InvalidParameters("a and b must be nonzero")
            for s in range(e):
                if not (self.field.embed(self.a, s) > 0 or self.field.embed(self.b, s) > 0):
                    raise InvalidParameters("quaternion algebra is not totally indefinite")

    @classmethod
    def type_i(cls, minpoly: Sequence[int]) -> "Algebra":
        return cls(AlgebraKind.TYPE_I, NumberField.from_minpoly(minpoly))

    @classmethod
    def type_ii(cls, minpoly: Sequence[int], a, b) -> "Algebra":
        F = NumberField.from_minpoly(minpoly)
        a = _as_field_elem(a, F.degree)
        b = _as_field_elem(b, F.degree)
        return cls(AlgebraKind.TYPE_II, F, a, b)

    @property
    def d(self) -> int:
        return 1 if self.kind is AlgebraKind.TYPE_I else 2

    @property
    def e(self) -> int:
        return self.field.degree

    @property
    def dim(self) -> int:
        return self.d * self.d * self.e

    # -- element helpers --------------------------------------------------

    def zero(self) -> AlgElem:
        return (0,) * self.dim

    def one(self) -> AlgElem:
        return (1,) + (0,) * (self.dim - 1)

    def basis(self) -> list[AlgElem]:
        return [tuple(int(i == k) for i in range(self.dim)) for k in range(self.dim)]

    def from_field(self, f) -> AlgElem:
        return tuple(f) + (0,) * (self.dim - self.e)

    def units(self) -> dict[str, AlgElem]:
        """The algebra generators t (and i, j for type II)."""
        out = {"t": self.from_field(self.field.generator())}
        if self.kind is AlgebraKind.TYPE_II:
            e = self.e
            out["i"] = tuple(int(k == e) for k in range(self.dim))
            out["j"] = tuple(int(k == 2 * e) for k in range(self.dim))
        return out

    def components(self, x: AlgElem) -> list[tuple]:
        e = self.e
        return [tuple(x[q * e:(q + 1) * e]) for q in range(self.d * self.d)]

    def from_components(self, parts) -> AlgElem:
        out = []
        for p in parts:
            out.extend(p)
        return tuple(normalize(c) for c in out)

    def add(self, x, y) -> AlgElem:
        return tuple(normalize(a + b) for a, b in zip(x, y))

    def sub(self, x, y) -> AlgElem:
        return tuple(normalize(a - b) for a, b in zip(x, y))

    def scale(self, c, x) -> AlgElem:
        return tuple(normalize(c * a) for a in x)

    def neg(self, x) -> AlgElem:
        return tuple(-a for a in x)

    def is_zero(self, x) -> bool:
        return not any(x)

    def in_center(self, x) -> bool:
        return not any(x[self.e:])

    # -- multiplication ---------------------------------------------------

    def mul(self, x: AlgElem, y: AlgElem) -> AlgElem:
        F = self.field
        if self.kind is AlgebraKind.TYPE_I:
            return F.mul(x, y)
        x0, x1, x2, x3 = self.components(x)
        y0, y1, y2, y3 = self.components(y)
        m = F.mul
        a, b = self.a, self.b
        ab = m(a, b)

        def comb(*terms):
            acc = [0] * self.e
            for coef, u, v in terms:
                if any(u) and any(v):
                    p = m(u, v)
                    if coef is not None:
                        p = m(coef, p)
                    acc = [s + t for s, t in zip(acc, p)]
            return acc

        neg_b = tuple(-c for c in b)
        neg_a = tuple(-c for c in a)
        neg_ab = tuple(-c for c in ab)
        minus = tuple([-1] + [0] * (self.e - 1))
        z0 = comb((None, x0, y0), (a, x1, y1), (b, x2, y2), (neg_ab, x3, y3))
        z1 = comb((None, x0, y1), (None, x1, y0), (neg_b, x2, y3), (b, x3, y2))
        z2 = comb((None, x0, y2), (None, x2, y0), (a, x1, y3), (neg_a, x3, y1))
        z3 = comb((None, x0, y3), (None, x3, y0), (None, x1, y2), (minus, x2, y1))
        return self.from_components([z0, z1, z2, z3])

    @cached_property
    def _left_mats(self) -> list[list[list]]:
        # left multiplication matrix by each basis element
        B = self.basis()
        out = []
        for bk in B:
            cols = [self.mul(bk, bl) for bl in B]
            out.append([[cols[l][i] for l in range(self.dim)] for i in range(self.dim)])
        return out

    def left_matrix(self, x: AlgElem) -> list[list]:
        """Matrix of y -> x y (column convention)."""
        n = self.dim
        out = [[0] * n for _ in range(n)]
        for c, M in zip(x, self._left_mats):
            if c:
                for i in range(n):
                    row, src = out[i], M[i]
                    for j in range(n):
                        if src[j]:
                            row[j] += c * src[j]
        return out

    def right_matrix(self, x: AlgElem) -> list[list]:
        """Matrix of y -> y x (column convention)."""
        B = self.basis()
        cols = [self.mul(bl, x) for bl in B]
        return [[cols[l][i] for l in range(self.dim)] for i in range(self.dim)]

    def inv(self, x: AlgElem) -> AlgElem:
        if self.is_zero(x):
            raise ZeroDivisor("zero has no inverse")
        if self.kind is AlgebraKind.TYPE_II:
            n = self.nrd_f(x)
            if not any(n):
                raise ZeroDivisor(f"{x} has zero reduced norm; the algebra is split")
            try:
                ninv = self.field.inv(n)
            except ZeroDivisionError:
                raise ZeroDivisor(f"reduced norm of {x} is not invertible") from None
            return self.mul(self.conj(x), self.from_field(ninv))
        sol = solve(self.left_matrix(x), self.one())
        if sol is None:
            raise ZeroDivisor(f"{x} is not invertible")
        return tuple(normalize(c) for c in sol)

    def conj(self, x: AlgElem) -> AlgElem:
        """Canonical involution (quaternion conjugation; identity for type I)."""
        if self.kind is AlgebraKind.TYPE_I:
            return tuple(x)
        x0, x1, x2, x3 = self.components(x)
        return self.from_components([x0] + [tuple(-c for c in p) for p in (x1, x2, x3)])

    # -- traces and norms -------------------------------------------------

    def trd_f(self, x: AlgElem) -> tuple:
        if self.kind is AlgebraKind.TYPE_I:
            return tuple(x)
        return tuple(normalize(2 * c) for c in x[:self.e])

    def nrd_f(self, x: AlgElem) -> tuple:
        if self.kind is AlgebraKind.TYPE_I:
            return tuple(x)
        F = self.field
        x0, x1, x2, x3 = self.components(x)
        a, b = self.a, self.b
        terms = [F.mul(x0, x0), F.mul(a, F.mul(x1, x1)), F.mul(b, F.mul(x2, x2)),
                 F.mul(F.mul(a, b), F.mul(x3, x3))]
        return tuple(normalize(p - q - r + s) for p, q, r, s in zip(*terms))

    def trd_q(self, x: AlgElem):
        return self.field.trace(self.trd_f(x))

    def nrd_q(self, x: AlgElem):
        return self.field.norm(self.nrd_f(x))

    def nm_q(self, x: AlgElem):
        """Non-reduced norm N_{D/Q} = Nrd_{D/Q}^d."""
        return self.nrd_q(x) ** self.d

    def tr_q(self, x: AlgElem):
        """Non-reduced trace Tr_{D/Q} = d Trd_{D/Q}."""
        return self.d * self.trd_q(x)

    @cached_property
    def trd_gram(self) -> list[list]:
        """Gram matrix of (x, y) -> Trd_{D/Q}(x y) on the basis."""
        B = self.basis()
        return [[self.trd_q(self.mul(x, y)) for y in B] for x in B]

    @cached_property
    def trd_gram_inv(self) -> list[list]:
        return inverse(self.trd_gram)

    # -- real places ------------------------------------------------------

    def place_matrix(self, place: int) -> np.ndarray:
        """Real (d^2 x dim) matrix sending coordinates to F_sigma-components."""
        r = self.field.roots[place]
        e = self.e
        k = self.d * self.d
        E = np.zeros((k, self.dim))
        for q in range(k):
            for p in range(e):
                E[q, q * e + p] = r**p
        return E

    def random_element(self, rng: random.Random, size: int = 5, den: int = 1) -> AlgElem:
        return tuple(normalize(Fraction(rng.randint(-size, size), rng.randint(1, den)))
                     for _ in range(self.dim))


def _as_field_elem(v, e: int) -> tuple:
    if isinstance(v, (int, Fraction)):
        v = [v]
    v = [normalize(Fraction(c)) for c in v]
    if len(v) > e:
        raise InvalidParameters("field element has too many coordinates")
    return tuple(v) + (0,) * (e - len(v))


# -- involutions ----------------------------------------------------------

@dataclass(frozen=True)
class Involution:
    """A positive involution given by its matrix on algebra coordinates."""

    algebra: Algebra
    matrix: tuple[tuple, ...]

    @classmethod
    def checked(cls, algebra: Algebra, matrix) -> "Involution":
        M = tuple(tuple(normalize(Fraction(c)) for c in row) for row in matrix)
        inv = cls(algebra, M)
        inv._validate()
        return inv

    def apply(self, x: AlgElem) -> AlgElem:
        return tuple(normalize(c) for c in mat_vec(self.matrix, x))

    def _validate(self):
        A = self.algebra
        n = A.dim
        P = [list(r) for r in self.matrix]
        if mat_mul(P, P) != [[int(i == j) for j in range(n)] for i in range(n)]:
            raise NotPositive("map is not an involution")
        B = A.basis()
        for x in B:
            for y in B:
                if self.apply(A.mul(x, y)) != A.mul(self.apply(y), self.apply(x)):
                    raise NotPositive("map is not anti-multiplicative")
        if not is_positive_definite(self.gram):
            raise NotPositive("Trd(x y^dagger) is not positive definite")

    @cached_property
    def gram(self) -> list[list]:
        """Gram of the positive form (x, y) -> Trd_{D/Q}(x y^dagger)."""
        A = self.algebra
        B = A.basis()
        return [[A.trd_q(A.mul(x, self.apply(y))) for y in B] for x in B]

    def is_identity(self) -> bool:
        n = self.algebra.dim
        return all(self.matrix[i][j] == int(i == j) for i in range(n) for j in range(n))


def is_positive_definite(G) -> bool:
    """Exact test via leading principal minors (LDL pivots)."""
    n = len(G)
    M = [[Fraction(c) for c in row] for row in G]
    for k in range(n):
        if M[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                for j in range(k, n):
                    M[i][j] -= f * M[k][j]
    return True


def norm_sq_D(A: Algebra, x: AlgElem, inv: Involution):
    """|x|_D^2 = Trd_{D/Q}(x x^dagger)."""
    return A.trd_q(A.mul(x, inv.apply(x)))


def antisym_basis(inv: Involution) -> list[AlgElem]:
    """A Q-basis of D^- = {x : x^dagger = -x}."""
    n = inv.algebra.dim
    M = [[inv.matrix[i][j] + (i == j) for j in range(n)] for i in range(n)]
    return [_primitive(v) for v in nullspace(M, n)]


def sym_traceless_basis(inv: Involution) -> list[AlgElem]:
    """A Q-basis of {x : x^dagger = x, Trd_{D/F}(x) = 0}."""
    A = inv.algebra
    n = A.dim
    rows = [[inv.matrix[i][j] - (i == j) for j in range(n)] for i in range(n)]
    # Trd_{D/F} is 2 x_0 for type II: kill the F-coefficients of 1
    for p in range(A.e):
        rows.append([int(j == p) for j in range(n)])
    return [_primitive(v) for v in nullspace(rows, n)]


def _primitive(v) -> AlgElem:
    den = 1
    for c in v:
        den = math.lcm(den, Fraction(c).denominator)
    w = [int(c * den) for c in v]
    g = 0
    for c in w:
        g = math.gcd(g, c)
    return tuple(c // g for c in w) if g else tuple(w)


# -- numerical splitting -------------------------------------------------

@dataclass(frozen=True)
class RealSplit:
    """D tensor R identified with M_d(R)^e, with dagger becoming transpose.

    ``forward`` is the real (e*d*d x dim) matrix sending coordinates to the
    stacked per-place matrices; ``backward`` is its inverse.
    """

    algebra: Algebra
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)

    @property
    def places(self) -> int:
        return self.algebra.e

    def to_matrices(self, x) -> np.ndarray:
        v = np.asarray([float(c) for c in x])
        d = self.algebra.d
        return (self.forward @ v).reshape(self.places, d, d)

    def from_matrices(self, mats: np.ndarray) -> np.ndarray:
        return self.backward @ np.asarray(mats, dtype=float).reshape(-1)

    def residuals(self, inv: Involution, samples: int = 20, seed: int = 0) -> dict[str, float]:
        A = self.algebra
        rng = random.Random(seed)
        hom = tr = frob = 0.0
        for _ in range(samples):
            x = A.random_element(rng, 9, 4)
            y = A.random_element(rng, 9, 4)
            X, Y = self.to_matrices(x), self.to_matrices(y)
            XY = self.to_matrices(A.mul(x, y))
            scale = max(np.linalg.norm(X) * np.linalg.norm(Y), 1e-300)
            hom = max(hom, np.linalg.norm(XY - X @ Y) / scale)
            Xd = self.to_matrices(inv.apply(x))
            tr = max(tr, np.linalg.norm(Xd - np.transpose(X, (0, 2, 1))) / max(np.linalg.norm(X), 1e-300))
            ns = float(norm_sq_D(A, x, inv))
            if ns:
                frob = max(frob, abs(float(np.sum(X * X)) - ns) / ns)
        return {"homomorphism": hom, "transpose": tr, "frobenius": frob}


def _quat_mul(u, v, a, b):
    x0, x1, x2, x3 = u
    y0, y1, y2, y3 = v
    return np.array([
        x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
        x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
        x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
        x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
    ])


def _quat_nrd(u, a, b):
    x0, x1, x2, x3 = u
    return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3


def real_split(A: Algebra, inv: Involution) -> RealSplit:
    e = A.e
    if A.kind is AlgebraKind.TYPE_I:
        fwd = np.vstack([A.place_matrix(s) for s in range(e)])
    else:
        minus = antisym_basis(inv)
        sym = sym_traceless_basis(inv)
        blocks = []
        for s in range(e):
            E = A.place_matrix(s)
            a = A.field.embed(A.a, s)
            b = A.field.embed(A.b, s)
            g = max((E @ np.array([float(c) for c in v]) for v in minus), key=np.linalg.norm)
            ng = _quat_nrd(g, a, b)
            if ng <= 0:
                raise SplitFailure("anti-symmetric generator has non-positive norm")
            eps = g / math.sqrt(ng)
            u = None
            for v in sym:
                cand = E @ np.array([float(c) for c in v])
                nu = -_quat_nrd(cand, a, b)
                if nu > 1e-6 * float(cand @ cand):
                    u = cand / math.sqrt(nu)
                    break
            if u is None:
                raise SplitFailure("no usable symmetric traceless element")
            one = np.array([1.0, 0, 0, 0])
            e11 = (one + u) / 2
            e22 = (one - u) / 2
            ue = _quat_mul(u, eps, a, b)
            e12 = _quat_mul(e11, ue, a, b)
            e21 = _quat_mul(e22, ue, a, b)
            U = np.column_stack([e11, e12, e21, e22])
            blocks.append(np.linalg.solve(U, E))
        fwd = np.vstack(blocks)
    bwd = np.linalg.inv(fwd)
    sp = RealSplit(A, fwd, bwd)
    res = sp.residuals(inv)
    if max(res.values()) > SPLIT_TOL:
        raise SplitFailure(f"splitting residuals too large: {res}")
    return sp
