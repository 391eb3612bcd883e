"""Deterministic generation of test instances.

The standard instance is V = D^m with D acting by left multiplication on
each block and L = R_0^m for the standard order R_0 (the Z[t]-span of the
algebra basis).  Difficulty comes from random coordinate changes and
optional sublattice passes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Algebra, AlgebraKind
from .errors import InvalidParameters
from .hermitian import Instance
from .linalg import ZLattice, identity, vec_mat

MAX_DIM = 24


def _standard_dagger(A: Algebra, x):
    """x -> i^{-1} conj(x) i: i -> -i, j -> j, ij -> ij (identity on type I)."""
    if A.kind is AlgebraKind.TYPE_I:
        return tuple(x)
    e = A.e
    return tuple(-c if e <= k < 2 * e else c for k, c in enumerate(x))


def standard_instance(A: Algebra, m: int) -> Instance:
    if m < 1:
        raise InvalidParameters("m must be positive")
    if A.kind is AlgebraKind.TYPE_I and m % 2:
        raise InvalidParameters("type I needs even m")
    k = A.dim
    n = k * m
    if n > MAX_DIM:
        raise InvalidParameters(f"dimension {n} exceeds {MAX_DIM}")
    basis = A.basis()
    if A.kind is AlgebraKind.TYPE_II:
        if any(Fraction(c).denominator != 1 for c in A.a + A.b):
            raise InvalidParameters("standard order needs integral a and b")
        for s in range(A.e):
            if not (A.field.embed(A.a, s) < 0 < A.field.embed(A.b, s)):
                raise InvalidParameters(
                    "standard involution needs a totally negative and b totally positive")
    # block left-regular action
    action = {}
    for name, g in A.units().items():
        Lg = A.left_matrix(g)
        M = [[0] * n for _ in range(n)]
        for blk in range(m):
            for r in range(k):
                for s in range(k):
                    M[blk * k + r][blk * k + s] = Lg[r][s]
        action[name] = M
    phi = [[0] * n for _ in range(n)]
    if A.kind is AlgebraKind.TYPE_II:
        # psi_0(x, y) = sum_k x_k i y_k^dagger, phi = Trd o psi_0
        i = A.units()["i"]
        for blk in range(m):
            for r, br in enumerate(basis):
                bri = A.mul(br, i)
                for s, bs in enumerate(basis):
                    phi[blk * k + r][blk * k + s] = A.trd_q(A.mul(bri, _standard_dagger(A, bs)))
    else:
        # psi_0 pairs blocks (2p, 2p+1) with value 1
        for p in range(m // 2):
            for r, br in enumerate(basis):
                for s, bs in enumerate(basis):
                    val = A.trd_q(A.mul(br, bs))
                    phi[2 * p * k + r][(2 * p + 1) * k + s] = val
                    phi[(2 * p + 1) * k + r][2 * p * k + s] = -val
    return Instance(A, action, phi, identity(n))


def mix(inst: Instance, seed: int, steps: int,
        sublattice: tuple[int, int] | None = None) -> Instance:
    """Random integral change of coordinates, optionally followed by a
    sublattice pass (p, k): L -> R-span of k random vectors + pL."""
    rng = random.Random(seed)
    n = inst.n
    action = {name: [list(r) for r in M] for name, M in inst.action.items()}
    phi = [list(r) for r in inst.phi]
    lattice = [list(r) for r in inst.lattice]
    for _ in range(steps):
        p, q = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        # gamma = I + c E_pq;  x -> gamma x
        for M in action.values():
            # M -> gamma M gamma^{-1}
            for col in range(n):
                M[p][col] += c * M[q][col]
            for row in range(n):
                M[row][q] -= c * M[row][p]
        # Phi -> gamma^{-t} Phi gamma^{-1}, gamma^{-1} = I - c E_pq
        for col in range(n):
            phi[q][col] -= c * phi[p][col]
        for row in range(n):
            phi[row][q] -= c * phi[row][p]
        # lattice rows b -> gamma b
        for b in lattice:
            b[p] += c * b[q]
    out = Instance(inst.algebra, action, phi, lattice)
    if sublattice is None:
        return out
    prime, count = sublattice
    if prime not in (2, 3, 5):
        raise InvalidParameters("sublattice prime must be 2, 3 or 5")
    from .orders import stabilizer_order  # local import: orders depends on hermitian

    R = stabilizer_order(out)
    gens = [[prime * c for c in b] for b in out.lattice]
    for _ in range(count):
        coeffs = [rng.randint(-3, 3) for _ in range(n)]
        v = vec_mat(coeffs, out.lattice)
        gens.extend(out.act(r, v) for r in R.basis)
    sub = ZLattice.from_generators(gens, n)
    return Instance(out.algebra, out.action, out.phi, [list(r) for r in sub.basis])


# -- corpus --------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraSpec:
    name: str
    kind: str
    minpoly: tuple[int, ...]
    a: tuple = ()
    b: tuple = ()

    def build(self) -> Algebra:
        if self.kind == "I":
            return Algebra.type_i(self.minpoly)
        return Algebra.type_ii(self.minpoly, list(self.a), list(self.b))


# (-1,3|Q) and (-1,7|Q) ramify at {2,3} and {2,7}; over Q(sqrt5) both split,
# so the e=2 entry uses b=11, which ramifies at the two primes above 11.
CORPUS_ALGEBRAS = (
    AlgebraSpec("Q", "I", (0, 1)),
    AlgebraSpec("Q(sqrt2)", "I", (-2, 0, 1)),
    AlgebraSpec("Q(sqrt5)", "I", (-5, 0, 1)),
    AlgebraSpec("Q(zeta9)+", "I", (1, -3, 0, 1)),
    AlgebraSpec("(-1,3|Q)", "II", (0, 1), (-1,), (3,)),
    AlgebraSpec("(-1,7|Q)", "II", (0, 1), (-1,), (7,)),
    AlgebraSpec("(-1,11|Q(sqrt5))", "II", (-5, 0, 1), (-1, 0), (11, 0)),
)

CORPUS_SHAPES = (
    ("Q", 2), ("Q", 4), ("Q", 6),
    ("Q(sqrt2)", 2), ("Q(sqrt2)", 4),
    ("Q(sqrt5)", 2), ("Q(sqrt5)", 4),
    ("Q(zeta9)+", 2),
    ("(-1,3|Q)", 1), ("(-1,3|Q)", 2), ("(-1,3|Q)", 3),
    ("(-1,7|Q)", 1), ("(-1,7|Q)", 2), ("(-1,7|Q)", 3),
    ("(-1,11|Q(sqrt5))", 1), ("(-1,11|Q(sqrt5))", 2),
)

MIX_STEPS = (0, 8, 32)
SUBLATTICES = (None, (2, 1), (3, 1), (5, 1))


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    algebra: str
    m: int
    steps: int
    sublattice: tuple[int, int] | None
    seed: int

    def build(self) -> Instance:
        spec = next(s for s in CORPUS_ALGEBRAS if s.name == self.algebra)
        inst = standard_instance(spec.build(), self.m)
        return mix(inst, self.seed, self.steps, self.sublattice)


def corpus_entries(count: int = 100, seed: int = 0) -> list[CorpusEntry]:
    """Cycle through shapes, then mixing depths, then sublattice passes."""
    out = []
    ns, nm = len(CORPUS_SHAPES), len(MIX_STEPS)
    for k in range(count):
        alg, m = CORPUS_SHAPES[k % ns]
        steps = MIX_STEPS[(k // ns) % nm]
        sub = SUBLATTICES[(k // (ns * nm)) % len(SUBLATTICES)]
        s = seed + k
        tag = "L" if sub is None else f"p{sub[0]}"
        out.append(CorpusEntry(f"{alg}-m{m}-mix{steps}-{tag}-s{s}", alg, m, steps, sub, s))
    return out


def corpus_algebras() -> list[Algebra]:
    return [s.build() for s in CORPUS_ALGEBRAS]


def algebra_by_name(name: str) -> Algebra:
    return next(s for s in CORPUS_ALGEBRAS if s.name == name).build()
