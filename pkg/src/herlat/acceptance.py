"""Acceptance criteria as runnable checks.

Each ``criterion_N`` returns a :class:`Result`.  ``run_all`` runs them in
order and echoes one line per criterion, which is what ``herlat selftest``
and the acceptance test print.
"""

from __future__ import annotations

import random
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .algebra import AlgebraKind, antisym_basis, norm_sq_D, real_split
from .bounds import compare_power_bound, index_bound
from .hermitian import adjoint_involution, build_psi, disc_trd_form, orth_complement, r_module
from .instancegen import CORPUS_ALGEBRAS, corpus_entries, standard_instance
from .linalg import ZLattice, det, snf_index
from .orders import (dual_lattice, endo_order, eta_min, omega_bound_squared, omega_short,
                     order_disc, stabilizer_order)
from .reduction import hall_sigma, reduce_full
from .verify import brute_force_matching, hall_feasible, verify_certificate


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, title: str):
    def wrap(fn):
        def run(quick: bool = False) -> Result:
            t0 = time.perf_counter()
            passed, detail = fn(quick)
            return Result(number, title, bool(passed), detail, time.perf_counter() - t0)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _setup(inst):
    inv = adjoint_involution(inst)
    return inv, stabilizer_order(inst)


def _standard_involution(A):
    return adjoint_involution(standard_instance(A, 1 if A.kind is AlgebraKind.TYPE_II else 2))


@_timed(1, "trace duality Trd(psi) = phi")
def criterion_1(quick: bool = False):
    count = 40 if quick else 200
    t0 = time.perf_counter()
    bad = []
    for entry in corpus_entries(count):
        inst = entry.build()
        A = inst.algebra
        form = build_psi(inst, adjoint_involution(inst))
        n = inst.n
        for r in range(n):
            er = [int(k == r) for k in range(n)]
            for s in range(n):
                es = [int(k == s) for k in range(n)]
                if A.trd_q(form.psi(er, es)) != inst.phi[r][s]:
                    bad.append(entry.name)
                    break
            else:
                continue
            break
    elapsed = time.perf_counter() - t0
    ok = not bad and (quick or elapsed < 60)
    return ok, f"{count} instances, {len(bad)} mismatches, {elapsed:.1f}s"


@_timed(2, "reduce_full + verify_certificate")
def criterion_2(quick: bool = False):
    count = 24 if quick else 100
    failures, slowest = [], 0.0
    for entry in corpus_entries(count):
        inst = entry.build()
        t0 = time.perf_counter()
        try:
            cert = reduce_full(inst)
            rep = verify_certificate(inst, cert)
            if not rep.ok:
                failures.append(f"{entry.name}: {rep.failed()}")
        except Exception as exc:  # reported, not raised
            failures.append(f"{entry.name}: {type(exc).__name__}")
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if dt >= 10:
            failures.append(f"{entry.name}: {dt:.1f}s")
    detail = f"{count} instances, slowest {slowest:.2f}s"
    if failures:
        detail += f", failures: {failures[:3]}"
    return not failures, detail


@_timed(3, "discriminant identity on outputs")
def criterion_3(quick: bool = False):
    count = 24 if quick else 100
    bad = []
    for entry in corpus_entries(count, seed=500):
        inst = entry.build()
        cert = reduce_full(inst)
        inv, R = _setup(inst)
        A = inst.algebra
        top = inst.in_lattice_coordinates()
        form = build_psi(top, inv)
        span = r_module(top, R.basis, cert.basis)
        lhs = abs(disc_trd_form(span, form))
        m = inst.m
        rhs = Fraction(abs(order_disc(R)) ** m, A.d ** (A.dim * m))
        partner = hall_sigma([[any(x) for x in row] for row in form.gram(cert.basis)])
        for i, j in enumerate(partner):
            rhs *= abs(A.nm_q(form.psi(cert.basis[i], cert.basis[j])))
        if lhs != rhs:
            bad.append(entry.name)
    return not bad, f"{count} outputs, {len(bad)} mismatches"


@_timed(4, "algebra identities")
def criterion_4(quick: bool = False):
    samples = 100 if quick else 1000
    rng = random.Random(4)
    fails: dict[str, int] = {}

    def miss(key):
        fails[key] = fails.get(key, 0) + 1

    for spec in CORPUS_ALGEBRAS:
        A = spec.build()
        inv = _standard_involution(A)
        de = A.d * A.e
        minus = antisym_basis(inv)
        for _ in range(samples):
            a = A.random_element(rng, 6, rng.choice((1, 2, 3)))
            b = A.random_element(rng, 6, rng.choice((1, 2, 3)))
            na, nb = norm_sq_D(A, a, inv), norm_sq_D(A, b, inv)
            if norm_sq_D(A, A.mul(a, b), inv) > na * nb:
                miss("submult")
            # |Nrd(a)|^2 (de)^de <= (|a|^2)^de
            if Fraction(A.nrd_q(a)) ** 2 * de ** de > Fraction(na) ** de:
                miss("nrd_bound")
            if A.trd_q(A.mul(a, b)) != A.trd_q(A.mul(b, a)) or A.trd_q(inv.apply(a)) != A.trd_q(a):
                miss("trace_symmetry")
            if minus:
                u = _combo(A, minus, rng)
                w = _combo(A, minus, rng)
                if not A.in_center(A.mul(u, w)):
                    miss("antisym_product")
                lhs = A.mul(A.mul(a, u), inv.apply(a))
                if tuple(lhs) != tuple(A.mul(A.from_field(A.nrd_f(a)), u)):
                    miss("antisym_conjugation")
    detail = f"{samples} samples x {len(CORPUS_ALGEBRAS)} algebras, failures {fails or 0}"
    return not fails, detail


def _combo(A, gens, rng):
    x = A.zero()
    for g in gens:
        x = A.add(x, A.scale(Fraction(rng.randint(-5, 5), rng.randint(1, 3)), g))
    return x


@_timed(5, "micro-instance ground truth")
def criterion_5(quick: bool = False):
    spec = next(s for s in CORPUS_ALGEBRAS if s.name == "(-1,3|Q)")
    A = spec.build()
    inst = standard_instance(A, 1)
    inv, R = _setup(inst)
    checks = {}
    # R0 = Z<1,i,j,ij> has the standard coordinate lattice
    checks["R=R0"] = R.zlattice().basis == ZLattice.standard(4).basis
    # Trd-Gram of {1,i,j,ij} is diag(2,-2,6,6); times d^{d^2 e} = 16
    trd = [[A.trd_q(A.mul(x, y)) for y in A.basis()] for x in A.basis()]
    checks["trd_gram"] = trd == [[2, 0, 0, 0], [0, -2, 0, 0], [0, 0, 6, 0], [0, 0, 0, 6]]
    checks["disc=2304"] = abs(order_disc(R)) == 2304 == abs(det(trd)) * 16
    checks["dual_index=144"] = snf_index(dual_lattice(R).zlattice(), R.zlattice()) == 144
    checks["eta=1"] = eta_min(R, inv) == 1
    w = omega_short(R, inv, 1)
    checks["omega=+-6i"] = tuple(w) in ((0, 6, 0, 0), (0, -6, 0, 0))
    checks["|omega|^2=72"] = norm_sq_D(A, w, inv) == 72
    form = build_psi(inst, inv)
    checks["psi(1,1)=i"] = tuple(form.psi([1, 0, 0, 0], [1, 0, 0, 0])) == (0, 1, 0, 0)
    cert = reduce_full(inst)
    bound = index_bound(2, 1, 1, cert.eta_used, abs(order_disc(R)), abs(inst.disc))
    checks["index_bound"] = compare_power_bound(cert.index, bound)
    bad = [k for k, v in checks.items() if not v]
    return not bad, f"index {cert.index}" + (f", failed {bad}" if bad else ", all values match")


@_timed(6, "omega length bound")
def criterion_6(quick: bool = False):
    rows = []
    ok = True
    for spec in CORPUS_ALGEBRAS:
        A = spec.build()
        if A.kind is not AlgebraKind.TYPE_II:
            continue
        inst = standard_instance(A, 1)
        inv, R = _setup(inst)
        eta = eta_min(R, inv)
        w = omega_short(R, inv, eta)
        passed = compare_power_bound(norm_sq_D(A, w, inv), omega_bound_squared(A.e, eta, R.disc))
        ok &= passed
        rows.append(f"{spec.name} |w|^2={norm_sq_D(A, w, inv)}")
    return ok, "; ".join(rows)


@_timed(7, "disc(L) R-dagger in R, eta_min | disc L")
def criterion_7(quick: bool = False):
    count = 40 if quick else 200
    bad = []
    for entry in corpus_entries(count):
        inst = entry.build()
        inv, R = _setup(inst)
        A = inst.algebra
        dL = abs(inst.disc)
        inside = all(R.contains(A.scale(dL, inv.apply(r))) for r in R.basis)
        if not inside or dL % eta_min(R, inv):
            bad.append(entry.name)
    return not bad, f"{count} instances, {len(bad)} failures"


@_timed(8, "Hall matching vs brute force")
def criterion_8(quick: bool = False):
    rng = random.Random(8)
    count = 500
    agree = 0
    for _ in range(count):
        m = rng.randint(1, 5)
        dens = rng.random()
        pat = [[rng.random() < dens for _ in range(m)] for _ in range(m)]
        agree += brute_force_matching(pat) == hall_feasible(pat)
    return agree == count, f"{agree}/{count} patterns agree"


@_timed(9, "numerical split residuals")
def criterion_9(quick: bool = False):
    worst = 0.0
    for spec in CORPUS_ALGEBRAS:
        A = spec.build()
        inv = _standard_involution(A)
        res = real_split(A, inv).residuals(inv, samples=100, seed=9)
        worst = max(worst, *res.values())
    return worst <= 1e-8, f"max relative residual {worst:.2e}"


@_timed(10, "order inequalities")
def criterion_10(quick: bool = False):
    count = 40 if quick else 200
    fails: dict[str, int] = {}
    rng = random.Random(10)
    tried = 0

    def miss(key):
        fails[key] = fails.get(key, 0) + 1

    for entry in corpus_entries(count):
        inst = entry.build()
        inv, R = _setup(inst)
        A = inst.algebra
        dR = abs(order_disc(R))
        if dR < A.d ** A.dim:
            miss("disc_lower")
        # |disc R| = d^{d^2 e} covol(R)^2 under the |.|_D inner product
        G = np.array([[float(A.trd_q(A.mul(x, inv.apply(y)))) for y in R.basis] for x in R.basis])
        covol_sq = float(np.linalg.det(G))
        if abs(A.d ** A.dim * covol_sq - dR) > 1e-6 * dR:
            miss("covolume")
        _, dS = endo_order(inst, R)
        if abs(dS) > dR ** ((A.dim * inst.m + 1) * inst.m ** 2):
            miss("endo_order")
        top = inst.in_lattice_coordinates()
        form = build_psi(top, inv)
        L = ZLattice.standard(top.n)
        if A.kind is AlgebraKind.TYPE_I:
            # odd D-rank submodules are always degenerate for a symplectic form
            if top.m < 4:
                continue
            k = 2
        else:
            k = rng.randint(1, max(1, top.m - 1))
        tried += 1
        vecs = [[rng.randint(-2, 2) for _ in range(top.n)] for _ in range(k)]
        M = r_module(top, R.basis, vecs)
        dM = disc_trd_form(M, form) if M.rank else 0
        if dM:
            perp = orth_complement(form, L, M)
            both = ZLattice.from_generators(list(M.basis) + list(perp.basis), top.n)
            if both.rank != top.n or snf_index(L, both) > abs(dM):
                miss("complement_index")
    return not fails, f"{count} instances ({tried} complement draws), failures {fails or 0}"


@_timed(11, "deterministic certificates")
def criterion_11(quick: bool = False):
    from click.testing import CliRunner

    from .cli import main

    runner = CliRunner()
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in range(2):
            inst_path = Path(tmp) / f"inst{run}.json"
            cert_path = Path(tmp) / f"cert{run}.json"
            r1 = runner.invoke(main, ["gen", "--type", "II", "--minpoly", "0,1", "--a", "-1", "--b", "3",
                                      "--m", "2", "--mix", "8", "--seed", "11",
                                      "--sublattice", "3,1", "--out", str(inst_path)])
            r2 = runner.invoke(main, ["reduce", "--in", str(inst_path), "--out", str(cert_path),
                                      "--seed", "11"])
            if r1.exit_code or r2.exit_code:
                return False, f"cli exit codes {r1.exit_code}, {r2.exit_code}"
            outputs.append((inst_path.read_bytes(), cert_path.read_bytes()))
    same = outputs[0] == outputs[1]
    return same, "byte-identical" if same else "outputs differ"


CRITERIA: list[Callable[[bool], Result]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
]


def run_all(quick: bool = False, echo: Callable[[str], None] = print) -> list[Result]:
    results = []
    for crit in CRITERIA:
        res = crit(quick)
        echo(res.line())
        results.append(res)
    return results
