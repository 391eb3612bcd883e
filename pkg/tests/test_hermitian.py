import random
from fractions import Fraction

import numpy as np
import pytest

from herlat.algebra import real_split
from herlat.errors import AdjointNotInAlgebra, DegenerateBlock, InvalidInstance, NotPositive
from herlat.hermitian import (Instance, adapted_gram_integral, adapted_norm, adjoint_involution,
                              build_psi, disc_trd_form, disc_identity_sides, normalize_weak_basis,
                              orth_complement, r_module, restrict_instance)
from herlat.instancegen import algebra_by_name, corpus_entries, mix, standard_instance
from herlat.linalg import ZLattice, identity
from herlat.orders import order_disc, stabilizer_order

MICRO_PHI = [[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, -6], [0, 0, 6, 0]]


def test_micro_phi(micro):
    assert [list(r) for r in micro.phi] == MICRO_PHI


def test_instance_validation(micro):
    A = micro.algebra
    with pytest.raises(InvalidInstance):
        Instance(A, micro.action, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], identity(4))
    with pytest.raises(InvalidInstance):
        Instance(A, {"t": micro.action["t"]}, micro.phi, identity(4))
    bad = dict(micro.action)
    bad["i"] = micro.action["j"]
    with pytest.raises(InvalidInstance):
        Instance(A, bad, micro.phi, identity(4))
    with pytest.raises(InvalidInstance):  # phi not integral on (1/2) Z^4
        Instance(A, micro.action, micro.phi, [[Fraction(1, 2) * int(i == j) for j in range(4)] for i in range(4)])


def test_adjoint_involution_micro(micro):
    inv = adjoint_involution(micro)
    A = micro.algebra
    assert inv.apply(A.units()["i"]) == (0, -1, 0, 0)
    assert inv.apply(A.units()["j"]) == (0, 0, 1, 0)
    assert inv.apply((0, 0, 0, 1)) == (0, 0, 0, 1)
    assert adjoint_involution(micro).matrix == inv.matrix


def test_adjoint_type_i_is_identity():
    inst = standard_instance(algebra_by_name("Q(sqrt5)"), 2)
    assert adjoint_involution(inst).is_identity()


def test_adjoint_not_in_algebra(micro):
    phi = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    with pytest.raises(AdjointNotInAlgebra):
        adjoint_involution(Instance(micro.algebra, micro.action, phi, identity(4)))


def test_adjoint_not_positive():
    # on Q(sqrt2) this phi makes the adjoint the Galois conjugation
    A = algebra_by_name("Q(sqrt2)")
    base = standard_instance(A, 2)
    phi = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    with pytest.raises(NotPositive):
        adjoint_involution(Instance(A, base.action, phi, identity(4)))


def test_psi_micro(micro_form):
    assert micro_form.psi([1, 0, 0, 0], [1, 0, 0, 0]) == (0, 1, 0, 0)


@pytest.mark.parametrize("entry", corpus_entries(16, seed=40), ids=lambda e: e.name)
def test_psi_properties(entry):
    inst = entry.build()
    inv = adjoint_involution(inst)
    form = build_psi(inst, inv)
    A = inst.algebra
    n = inst.n
    for r in range(n):
        er = [int(k == r) for k in range(n)]
        for s in range(n):
            assert A.trd_q(form.psi(er, [int(k == s) for k in range(n)])) == inst.phi[r][s]
    rng = random.Random(entry.seed)
    for _ in range(3):
        x = [rng.randint(-3, 3) for _ in range(n)]
        y = [rng.randint(-3, 3) for _ in range(n)]
        a, b = A.random_element(rng, 3), A.random_element(rng, 3)
        pxy = form.psi(x, y)
        assert form.psi(y, x) == A.neg(inv.apply(pxy))
        assert form.psi(inst.act(a, x), inst.act(b, y)) == A.mul(A.mul(a, pxy), inv.apply(b))
        pxx = form.psi(x, x)
        assert inv.apply(pxx) == A.neg(pxx)


def test_orth_complement_examples():
    inst = standard_instance(algebra_by_name("Q"), 4)
    form = build_psi(inst, adjoint_involution(inst))
    L = ZLattice.standard(4)
    assert orth_complement(form, L, L).rank == 0
    assert orth_complement(form, L, ZLattice.from_basis([], 4)).basis == L.basis
    first = ZLattice.from_basis([[1, 0, 0, 0], [0, 1, 0, 0]])
    assert orth_complement(form, L, first).basis == ZLattice.from_basis([[0, 0, 1, 0], [0, 0, 0, 1]]).basis


def test_orth_complement_is_exact():
    inst = mix(standard_instance(algebra_by_name("(-1,7|Q)"), 3), 5, 8).in_lattice_coordinates()
    inv = adjoint_involution(inst)
    form = build_psi(inst, inv)
    R = stabilizer_order(inst)
    M = r_module(inst, R.basis, [[1] + [0] * 11])
    perp = orth_complement(form, ZLattice.standard(12), M)
    assert perp.rank == 8
    assert all(inst.phi_eval(w, x) == 0 for w in M.basis for x in perp.basis)


def test_disc_trd_form_scaling():
    inst = standard_instance(algebra_by_name("Q"), 2)
    form = build_psi(inst, adjoint_involution(inst))
    assert disc_trd_form(ZLattice.standard(2), form) == 1
    assert disc_trd_form(ZLattice.from_basis([[2, 0], [0, 2]]), form) == 16


def test_disc_identity_on_standard_basis(micro, micro_form, micro_order):
    lhs, rhs = disc_identity_sides(micro_form, micro_order.basis, order_disc(micro_order), [[1, 0, 0, 0]], [0])
    assert lhs == rhs


def test_adapted_norm_euclidean_for_standard_q():
    inst = standard_instance(algebra_by_name("Q"), 2)
    form = build_psi(inst, adjoint_involution(inst))
    G = adapted_norm(form, real_split(inst.algebra, form.involution))
    assert np.allclose(G.matrix, np.eye(2))


def test_adapted_norm_micro(micro, micro_form):
    G = adapted_norm(micro_form, real_split(micro.algebra, micro_form.involution))
    assert abs(G.norm_sq([1, 0, 0, 0]) - 2) < 1e-9
    assert np.allclose(G.matrix, np.diag([2.0, 2.0, 6.0, 6.0]))


@pytest.mark.parametrize("entry", corpus_entries(16, seed=70), ids=lambda e: e.name)
def test_adapted_norm_covolume(entry):
    inst = entry.build().in_lattice_coordinates()
    form = build_psi(inst, adjoint_involution(inst))
    split = real_split(inst.algebra, form.involution)
    G = adapted_norm(form, split, check=True)
    assert abs(np.linalg.det(G.matrix) - abs(float(inst.disc))) <= 1e-6 * abs(float(inst.disc))
    Gi = np.array(adapted_gram_integral(form, split), dtype=float)
    np.linalg.cholesky(Gi)


def test_normalize_weak_basis_type_i():
    inst = standard_instance(algebra_by_name("Q"), 2)
    form = build_psi(inst, adjoint_involution(inst))
    split = real_split(inst.algebra, form.involution)
    s = normalize_weak_basis(form, split, [[1, 0], [0, 1]])
    assert np.allclose([x.item() for x in s], [1.0, 1.0])
    s = normalize_weak_basis(form, split, [[2, 0], [0, 1]])
    assert np.allclose([x.item() for x in s], [2 ** 0.5, 2 ** 0.5])
    with pytest.raises(DegenerateBlock):
        normalize_weak_basis(form, split, [[1, 0], [1, 0]])


def test_normalize_weak_basis_type_ii(micro, micro_form):
    split = real_split(micro.algebra, micro_form.involution)
    # psi(1, 1) = i is already unitary: the scaling has unit entries
    (s,) = normalize_weak_basis(micro_form, split, [[1, 0, 0, 0]])
    assert np.allclose(np.abs(s[0]), np.eye(2), atol=1e-9)
    # psi(6, 6) = 36 i needs a per-place scaling by 6
    (s,) = normalize_weak_basis(micro_form, split, [[6, 0, 0, 0]])
    assert np.allclose(np.abs(s[0]), 6 * np.eye(2), atol=1e-9)


def test_restrict_instance_rejects_unstable(micro):
    with pytest.raises(InvalidInstance):
        restrict_instance(micro, [[1, 0, 0, 0]])
