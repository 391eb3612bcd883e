"""Independent certificate checking and brute-force oracles."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .algebra import AlgebraKind, norm_sq_D
from .bounds import PowerBound, compare_power_bound, index_bound, psi_bound, theorem_bounds
from .errors import DegenerateForm, HerlatError
from .hermitian import Instance, adjoint_involution, build_psi, disc_trd_form, orth_complement, r_module
from .linalg import ZLattice, det, snf_index
from .orders import dual_lattice, order_disc, stabilizer_order
from .reduction import ReductionCertificate, hall_sigma, pattern_sigma

__all__ = ["compare_power_bound", "check_pattern", "verify_certificate", "oracle_suite",
           "Check", "Report"]


@dataclass
class Check:
    name: str
    passed: bool
    detail: Any = None


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: Any = None) -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{tag} {c.name}" + (f": {c.detail}" if c.detail is not None else ""))
        return "\n".join(lines)


def check_pattern(d_gram, kind: AlgebraKind) -> bool:
    """Weakly symplectic (type I) or weakly unitary (type II) zero pattern."""
    m = len(d_gram)
    if kind is AlgebraKind.TYPE_I and m % 2:
        return False
    partner = pattern_sigma(kind, m)
    for i in range(m):
        for j in range(m):
            nonzero = any(d_gram[i][j])
            if (j == partner[i]) != nonzero:
                return False
    return True


def verify_certificate(inst: Instance, cert: ReductionCertificate) -> Report:
    """Recompute every claim of ``cert`` from ``inst`` and the basis alone."""
    rep = Report()
    A = inst.algebra
    m, n = inst.m, inst.n
    basis = cert.basis
    shape_ok = len(basis) == m and all(len(v) == n for v in basis)
    rep.add("shape", shape_ok, f"{len(basis)} vectors for m={m}")
    if not shape_ok:
        return rep
    integral = all(isinstance(x, int) or Fraction(x).denominator == 1 for v in basis for x in v)
    rep.add("basis_in_L", integral)
    if not integral:
        return rep
    vectors = [[int(x) for x in v] for v in basis]
    try:
        inv = adjoint_involution(inst)
        top = inst.in_lattice_coordinates()
        form = build_psi(top, inv)
        R = stabilizer_order(inst)
    except HerlatError as exc:
        rep.add("rebuild", False, f"{type(exc).__name__}: {exc}")
        return rep
    disc_R = abs(order_disc(R))
    disc_L = abs(inst.disc)
    rep.add("disc_R", disc_R == abs(cert.disc_R), disc_R)
    rep.add("disc_L", disc_L == abs(cert.disc_L), disc_L)

    gram = form.gram(vectors)
    same_gram = all(tuple(Fraction(x) for x in gram[i][j]) == tuple(Fraction(x) for x in cert.d_gram[i][j])
                    for i in range(m) for j in range(m))
    rep.add("d_gram", same_gram)
    rep.add("pattern", check_pattern(gram, A.kind))
    norm_sq = [[norm_sq_D(A, x, inv) for x in row] for row in gram]
    rep.add("norm_sq", all(Fraction(norm_sq[i][j]) == Fraction(cert.norm_sq[i][j])
                           for i in range(m) for j in range(m)))

    span = r_module(top, R.basis, vectors)
    full = span.rank == n
    index = snf_index(ZLattice.standard(n), span) if full else 0
    rep.add("index", full and index == cert.index, index)

    eta = int(cert.eta_used)
    eta_ok = eta >= 1 and all(R.contains(A.scale(eta, inv.apply(r))) for r in R.basis)
    rep.add("eta_used", eta_ok, eta)
    d, e = A.d, A.e
    idx_t, psi_t = theorem_bounds(d, e, m, disc_R, disc_L)
    rep.add("index_bound_discL", full and compare_power_bound(index, idx_t))
    rep.add("psi_bound_discL", _form_bounds_hold(norm_sq, psi_t))
    if eta_ok:
        idx_p, psi_p = index_bound(d, e, m, eta, disc_R, disc_L), psi_bound(d, e, m, eta, disc_R, disc_L)
        rep.add("index_bound_eta", full and compare_power_bound(index, idx_p))
        rep.add("psi_bound_eta", _form_bounds_hold(norm_sq, psi_p))
        expected = {"index": idx_p, "psi": psi_p, "index_discL": idx_t, "psi_discL": psi_t}
        rep.add("bounds", dict(cert.bounds) == expected)
    else:
        rep.add("index_bound_eta", False, "no valid eta")
        rep.add("psi_bound_eta", False, "no valid eta")
        rep.add("bounds", False, "no valid eta")

    # |disc(sum R v_i)| = d^{-d^2 e m} |disc R|^m prod |Nm psi(v_i, v_sigma(i))|
    if full:
        lhs = abs(disc_trd_form(span, form))
        rhs = Fraction(disc_R ** m, d ** (A.dim * m))
        for i, j in enumerate(pattern_sigma(A.kind, m)):
            rhs *= abs(A.nm_q(gram[i][j]))
        rep.add("disc_identity", lhs == rhs, f"{lhs} vs {rhs}")
    else:
        rep.add("disc_identity", False, "basis does not span")
    return rep


def _form_bounds_hold(norm_sq, bound: PowerBound) -> bool:
    sq = bound.power(2)
    return all(compare_power_bound(v, sq) for row in norm_sq for v in row if v)


# -- oracles --------------------------------------------------------------

def brute_force_matching(pattern: Sequence[Sequence[bool]]) -> bool:
    m = len(pattern)
    return any(all(pattern[i][p[i]] for i in range(m)) for p in itertools.permutations(range(m)))


def hall_feasible(pattern) -> bool:
    try:
        sigma = hall_sigma(pattern)
    except DegenerateForm:
        return False
    return all(pattern[i][sigma[i]] for i in range(len(pattern)))


def t_matrix(R, inv, a):
    A = R.algebra
    return [[A.trd_q(A.mul(A.mul(ri, a), inv.apply(rj))) for rj in R.basis] for ri in R.basis]


def oracle_suite(inst: Instance, seed: int = 0, hall_patterns: int = 50) -> Report:
    rep = Report()
    rng = random.Random(seed)
    A = inst.algebra
    inv = adjoint_involution(inst)
    R = stabilizer_order(inst)
    disc_R = order_disc(R)

    agree = True
    for _ in range(hall_patterns):
        m = rng.randint(1, 5)
        dens = rng.random()
        pat = [[rng.random() < dens for _ in range(m)] for _ in range(m)]
        agree &= brute_force_matching(pat) == hall_feasible(pat)
    rep.add("hall_oracle", agree)

    # det(T_a) = +- d^{-d^2 e} disc(R) Nm(a)
    ok = True
    for _ in range(20):
        a = A.random_element(rng, 4)
        lhs = abs(det(t_matrix(R, inv, a)))
        rhs = abs(Fraction(disc_R, A.d ** A.dim) * A.nm_q(a))
        ok &= lhs == rhs
    rep.add("trace_det_identity", ok)

    # [L : M + M^perp] <= |disc M| for random D-submodules M
    top = inst.in_lattice_coordinates()
    form = build_psi(top, inv)
    L = ZLattice.standard(top.n)
    ok = True
    for _ in range(3):
        k = rng.randint(1, max(1, top.m - 1))
        vecs = [[rng.randint(-2, 2) for _ in range(top.n)] for _ in range(k)]
        M = r_module(top, R.basis, vecs)
        dM = disc_trd_form(M, form)
        if dM == 0:
            continue
        perp = orth_complement(form, L, M)
        both = ZLattice.from_generators(list(M.basis) + list(perp.basis), top.n)
        ok &= both.rank == top.n and snf_index(L, both) <= abs(dM)
    rep.add("complement_index", ok)

    dual = dual_lattice(R)
    idx = Fraction(snf_index(dual.zlattice(), R.zlattice()))
    rep.add("dual_index", idx == Fraction(abs(disc_R), A.d ** A.dim), idx)
    return rep
