"""The reduction algorithm: short D-bases, pair selection, induction.

Every level of the recursion is an Instance written in the coordinates of
its own lattice (so the lattice is Z^k), together with the integer matrix
mapping those coordinates back to the coordinates of the input lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import AlgElem, AlgebraKind, Involution, RealSplit, norm_sq_D, real_split
from .bounds import (PowerBound, compare_power_bound, index_bound, psi_bound,
                     theorem_bounds)
from .enumeration import (DEFAULT_BUDGET, FloatGram, hermite_bound, lll_gram, lll_gram_exact,
                          shortest_outside)
from .errors import BoundViolation, DegenerateForm
from .hermitian import (Instance, SkewHermitianForm, adapted_gram_integral, adapted_norm,
                        adjoint_involution, build_psi, disc_trd_form, disc_identity_sides,
                        orth_complement, r_module, restrict_instance)
from .linalg import (ZLattice, identity, mat_mul, saturated_kernel, snf_index, transpose,
                     vec_mat)
from .orders import Order, eta_min, omega_short, order_disc, stabilizer_order

PRODUCT_TOL = 1e-6
PRECONDITION_ROUNDS = 6
MAX_CONDITION = 1e10


# -- D-basis from short vectors -------------------------------------------

def d_basis_minkowski(inst: Instance, G: FloatGram,
                      budget: int = DEFAULT_BUDGET) -> tuple[list[list[int]], list[float]]:
    """Greedy D-basis of short lattice vectors.

    Each w_k is a shortest vector of L outside the D-span of w_1..w_{k-1}.
    The lattice of ``inst`` is Z^n and G is written in the same coordinates.
    """
    A = inst.algebra
    Gl = np.array(G.matrix)
    ws: list[list[int]] = []
    norms: list[float] = []
    span: list[list] = []
    for _ in range(inst.m):
        coords, nrm = shortest_outside(Gl, span, budget)
        w = list(coords)
        ws.append(w)
        norms.append(math.sqrt(nrm))
        span.extend(inst.act(b, w) for b in A.basis())
    # product bound against the covolume of L
    n = inst.n
    covol = math.sqrt(abs(float(inst.disc)))
    rhs = hermite_bound(n) ** (inst.m / 2) * covol ** (1 / A.dim)
    if math.prod(norms) > rhs * (1 + PRODUCT_TOL):
        raise BoundViolation("short D-basis violates the Minkowski product bound")
    return ws, norms


# -- matching and pair selection ------------------------------------------

def hall_sigma(pattern: Sequence[Sequence[bool]]) -> list[int]:
    """Permutation sigma with pattern[i][sigma[i]] for all i (0-based)."""
    m = len(pattern)
    match_col: list[int | None] = [None] * m  # column -> row

    def augment(i, seen):
        for j in range(m):
            if pattern[i][j] and not seen[j]:
                seen[j] = True
                if match_col[j] is None or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(m):
        if not augment(i, [False] * m):
            raise DegenerateForm("no permutation avoids the zero entries of the psi-Gram")
    sigma = [0] * m
    for j, i in enumerate(match_col):
        sigma[i] = j
    return sigma


def select_pair(norms: Sequence[float], gram, sigma: Sequence[int],
                tol: float = 1e-12) -> tuple[int, int]:
    """Indices (i, j) of a short pair with psi(w_i, w_j) != 0 (0-based)."""
    prods = [norms[k] * norms[sigma[k]] for k in range(len(norms))]
    best = min(prods)
    k = next(k for k, p in enumerate(prods) if p <= best * (1 + tol))
    if sigma[k] == k:
        return k, k
    a, b = sorted((k, sigma[k]))
    i, other = (b, a) if norms[b] < norms[a] * (1 - tol) else (a, b)
    if any(gram[i][i]):
        return i, i
    return i, other


# -- one induction step ---------------------------------------------------

@dataclass
class Step:
    module: ZLattice
    vectors: list[list[int]]
    case: str
    i: int
    j: int
    w: list[list[int]] = field(repr=False)


def _sq_bound(pairs) -> PowerBound:
    return PowerBound.of(pairs).power(2)


def pre_induction(form: SkewHermitianForm, R: Order, eta: int, G: FloatGram,
                  omega: AlgElem | None = None, budget: int = DEFAULT_BUDGET) -> Step:
    inst = form.instance
    A = form.algebra
    inv = form.involution
    d, e, m = inst.d, inst.e, inst.m
    disc_L = abs(inst.disc)
    disc_R = abs(R.disc)
    ws, norms = d_basis_minkowski(inst, G, budget)
    gram = form.gram(ws)
    sigma = hall_sigma([[any(x) for x in row] for row in gram])
    i, j = select_pair(norms, gram, sigma)
    F = Fraction
    if A.kind is AlgebraKind.TYPE_I:
        if i == j:
            raise DegenerateForm("alternating form selected a diagonal pair")
        case, vecs = "a", [ws[i], ws[j]]
        bound = _sq_bound([(e * m, 1), (disc_L, F(1, e * m))])
        if not compare_power_bound(norm_sq_D(A, gram[i][j], inv), bound):
            raise BoundViolation("case (a) form bound fails")
    elif i == j:
        case, vecs = "b", [ws[i]]
        bound = _sq_bound([(4 * e * m, 1), (disc_L, F(1, 4 * e * m))])
        if not compare_power_bound(norm_sq_D(A, gram[i][i], inv), bound):
            raise BoundViolation("case (b) form bound fails")
    else:
        case = "c"
        vecs = _case_c(form, R, omega, ws[i], ws[j])
    r = 1 if case == "b" else 2
    module = r_module(inst, R.basis, [ws[i]] if i == j else [ws[i], ws[j]])
    dM = abs(disc_trd_form(module, form))
    if dM == 0:
        raise DegenerateForm("psi is degenerate on the selected module")
    nh = hermite_bound(A.dim * m)
    bound = PowerBound.of([(F(nh * nh, d ** 3 * e), F(A.dim * r, 2)), (disc_R, r),
                           (disc_L, F(r, m))])
    if not compare_power_bound(dM, bound):
        raise BoundViolation("|disc M| exceeds its bound")
    if case == "c":
        _check_case_c(form, R, eta, vecs, module, disc_R, disc_L)
    return Step(module, vecs, case, i, j, ws)


def _case_c(form: SkewHermitianForm, R: Order, omega, wi, wj) -> list[list[int]]:
    inst = form.instance
    A = form.algebra
    if omega is None:
        raise ValueError("case (c) needs omega")
    pij = form.psi(wi, wj)
    pjj = form.psi(wj, wj)
    c1 = A.scale(2, A.mul(pij, omega))
    c2 = A.mul(omega, pjj)
    for c in (c1, c2):
        if not R.contains(c):
            raise BoundViolation("case (c) coefficient is not in R")
    wjp = [a - b for a, b in zip(inst.act(c1, wj), inst.act(c2, wi))]
    v1 = [a - b for a, b in zip(wi, wjp)]
    v2 = [a + b for a, b in zip(wi, wjp)]
    # exact identities of the construction
    pji = form.psi(wjp, wi)
    expected = A.scale(-2, A.mul(A.from_field(A.nrd_f(pij)), omega))
    if pji != expected:
        raise BoundViolation("psi(w_j', w_i) != -2 Nrd(psi(w_i, w_j)) omega")
    if any(form.psi(v1, v2)) or form.psi(v1, v1) != A.scale(-2, pji):
        raise BoundViolation("case (c) vectors are not orthogonal")
    return [[int(x) for x in v1], [int(x) for x in v2]]


def _check_case_c(form, R, eta, vecs, module, disc_R, disc_L):
    inst, A, inv = form.instance, form.algebra, form.involution
    e, m = inst.e, inst.m
    F = Fraction
    nh = hermite_bound(4 * e * m)
    # |psi(v_k, v_k)|_D^2 <= 2^-5 e (4em)^4 eta^14 |disc R|^{4/e} |disc L|^{1/em}
    bound = PowerBound.of([(F(1, 32), 1), (e, 1), (nh, 4), (eta, 14), (disc_R, F(4, e)),
                           (disc_L, F(1, e * m))])
    for v in vecs:
        if not compare_power_bound(norm_sq_D(A, form.psi(v, v), inv), bound):
            raise BoundViolation("case (c) form bound fails")
    sub = r_module(inst, R.basis, vecs)
    idx = snf_index(module, sub)
    ibound = PowerBound.of([(F(1, 8), 2 * e), (F(nh * nh, 8 * e), 2 * e), (eta, 28 * e),
                            (disc_R, 8), (disc_L, F(1, m))])
    if not compare_power_bound(idx, ibound):
        raise BoundViolation("case (c) index bound fails")


# -- certificate ----------------------------------------------------------

@dataclass
class ReductionCertificate:
    basis: list[list[int]]
    case_trace: list[dict]
    index: int
    d_gram: list[list[AlgElem]]
    norm_sq: list[list[Fraction]]
    eta_used: int
    disc_R: int
    disc_L: int
    bounds: dict[str, PowerBound]


def _max_entry(inst: Instance) -> int:
    vals = [abs(Fraction(x)) for M in inst.action.values() for r in M for x in r]
    vals += [abs(Fraction(x)) for r in inst.phi for x in r]
    return max(max(v.numerator, v.denominator) for v in vals)


def conditioned_level(inst: Instance, to_top, inv: Involution, split: RealSplit,
                      seed: int = 0) -> tuple[Instance, list[list[int]], FloatGram]:
    """Re-coordinatize a level by LLL in the adapted norm until it is tame.

    ``inst`` has lattice Z^k.  Rounding errors in the adapted norm grow with
    the size of the coordinate matrices, so a rough norm is used to find a
    better basis before the final norm is computed.
    """
    for _ in range(PRECONDITION_ROUNDS):
        form = build_psi(inst, inv)
        try:
            G = adapted_norm(form, split, seed, check=False)
            if np.linalg.cond(G.matrix) > MAX_CONDITION:
                raise np.linalg.LinAlgError("adapted Gram is ill-conditioned")
            T, _ = lll_gram(G.matrix)
        except np.linalg.LinAlgError:
            T = lll_gram_exact(adapted_gram_integral(form, split))
        if T == identity(inst.n):
            break
        cand = restrict_instance(inst, T)
        if _max_entry(cand) >= _max_entry(inst):
            break
        inst, to_top = cand, mat_mul(T, to_top)
    G = adapted_norm(build_psi(inst, inv), split, seed)
    return inst, to_top, G


def reduce_full(inst: Instance, eta_mode: str = "min", budget: int = DEFAULT_BUDGET,
                seed: int = 0) -> ReductionCertificate:
    """Weakly symplectic / unitary basis of the lattice with certified bounds.

    Basis coordinates are relative to the lattice rows of ``inst``.
    """
    A = inst.algebra
    inv = adjoint_involution(inst)
    top = inst.in_lattice_coordinates()
    form_top = build_psi(top, inv)
    R = stabilizer_order(inst)
    disc_R = order_disc(R)
    disc_L = inst.disc
    emin = eta_min(R, inv)
    if disc_L % emin:
        raise BoundViolation("eta_min does not divide |disc L|")
    for r in R.basis:
        if not R.contains(A.scale(disc_L, inv.apply(r))):
            raise BoundViolation("disc(L) R^dagger is not inside R")
    if eta_mode == "min":
        eta = emin
    elif eta_mode == "discL":
        eta = abs(disc_L)
    else:
        raise ValueError(f"unknown eta mode {eta_mode!r}")
    omega = omega_short(R, inv, eta) if A.kind is AlgebraKind.TYPE_II else None
    split = real_split(A, inv)

    vectors: list[list[int]] = []
    trace: list[dict] = []
    levels: list[tuple[Instance, list[list[int]], int]] = []  # (level, to_top, first vector)
    level, to_top = top, identity(top.n)
    while True:
        level, to_top, G = conditioned_level(level, to_top, inv, split, seed)
        form = build_psi(level, inv)
        levels.append((level, to_top, len(vectors)))
        step = pre_induction(form, R, eta, G, omega, budget)
        trace.append({"case": step.case, "i": step.i + 1, "j": step.j + 1})
        vectors.extend(vec_mat(v, to_top) for v in step.vectors)
        if level.m == len(step.vectors):
            break
        perp = orth_complement(form, ZLattice.standard(level.n), step.module)
        # same lattice as perp, but a basis that is short in the current norm
        gens = [level.act(b, v) for v in step.vectors for b in A.basis()]
        rows = saturated_kernel(mat_mul(transpose(level.phi), transpose(gens)))
        rows = _lll_rows(rows, G)
        if ZLattice.from_generators(rows, level.n) != perp:
            raise BoundViolation("complement bases disagree")
        to_top = mat_mul(rows, to_top)
        level = restrict_instance(level, rows)

    d, e, m = inst.d, inst.e, inst.m
    # inductive bounds at every level (the top level is the final claim)
    for lvl, lt, start in levels:
        sub = [_coords_in(lt, v) for v in vectors[start:]]
        idx = snf_index(ZLattice.standard(lvl.n), r_module(lvl, R.basis, sub))
        if not compare_power_bound(idx, index_bound(d, e, lvl.m, eta, disc_R, lvl.disc)):
            raise BoundViolation(f"index bound fails at level m={lvl.m}")

    d_gram = form_top.gram(vectors)
    norm_sq = [[norm_sq_D(A, x, inv) for x in row] for row in d_gram]
    index = snf_index(ZLattice.standard(top.n), r_module(top, R.basis, vectors))
    bounds = {
        "index": index_bound(d, e, m, eta, disc_R, disc_L),
        "psi": psi_bound(d, e, m, eta, disc_R, disc_L),
    }
    bounds["index_discL"], bounds["psi_discL"] = theorem_bounds(d, e, m, disc_R, disc_L)
    for key in ("index", "index_discL"):
        if not compare_power_bound(index, bounds[key]):
            raise BoundViolation(f"{key} bound fails")
    for key in ("psi", "psi_discL"):
        sq = bounds[key].power(2)
        for row in norm_sq:
            for val in row:
                if val and not compare_power_bound(val, sq):
                    raise BoundViolation(f"{key} bound fails")
    sigma = pattern_sigma(A.kind, m)
    lhs, rhs = disc_identity_sides(form_top, R.basis, disc_R, vectors, sigma)
    if lhs != rhs:
        raise BoundViolation("discriminant identity fails on the output")
    return ReductionCertificate(
        basis=[[int(x) for x in v] for v in vectors],
        case_trace=trace,
        index=index,
        d_gram=d_gram,
        norm_sq=norm_sq,
        eta_used=eta,
        disc_R=disc_R,
        disc_L=disc_L,
        bounds=bounds,
    )


def pattern_sigma(kind: AlgebraKind, m: int) -> list[int]:
    """The permutation of the target pattern: pairs (2k, 2k+1) or identity."""
    if kind is AlgebraKind.TYPE_I:
        return [k + 1 if k % 2 == 0 else k - 1 for k in range(m)]
    return list(range(m))


def _lll_rows(rows: list[list[int]], G: FloatGram, rounds: int = 3) -> list[list[int]]:
    for _ in range(rounds):
        T, _ = lll_gram(G.restrict(rows).matrix)
        if T == identity(len(rows)):
            break
        rows = mat_mul(T, rows)
    return rows


def _coords_in(rows: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    """Integer c with c @ rows = v (rows have full row rank)."""
    from .linalg import solve_left

    c = solve_left(rows, v)
    return [int(x) for x in c]
