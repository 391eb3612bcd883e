import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herlat.algebra import (Algebra, AlgebraKind, Involution, NumberField, antisym_basis,
                            is_irreducible, norm_sq_D, real_split)
from herlat.errors import InvalidParameters, NotPositive, ZeroDivisor
from herlat.hermitian import adjoint_involution
from herlat.instancegen import CORPUS_ALGEBRAS, algebra_by_name, standard_instance

ALGEBRA_NAMES = [s.name for s in CORPUS_ALGEBRAS]


def std_inv(A):
    return adjoint_involution(standard_instance(A, 1 if A.kind is AlgebraKind.TYPE_II else 2))


def test_irreducibility():
    assert is_irreducible([-2, 0, 1])
    assert not is_irreducible([-4, 0, 1])
    assert is_irreducible([1, -3, 0, 1])
    assert not is_irreducible([0, 0, 1])


def test_number_field_validation():
    with pytest.raises(InvalidParameters):
        NumberField.from_minpoly([1, 0, 1])  # Q(i) is not totally real
    with pytest.raises(InvalidParameters):
        NumberField.from_minpoly([-1, 0, 2])  # not monic
    F = NumberField.from_minpoly([-2, 0, 1])
    assert sorted(round(r, 9) for r in F.roots) == [round(-2 ** 0.5, 9), round(2 ** 0.5, 9)]
    assert all(hi - lo <= Fraction(1, 10**12) for lo, hi in F.enclosures)


def test_field_arithmetic():
    F = NumberField.from_minpoly([-2, 0, 1])
    s = F.generator()
    assert F.mul(s, s) == (2, 0)
    assert F.norm(s) == -2 and F.trace(s) == 0
    assert F.mul(s, F.inv(s)) == F.one()


def test_quaternion_relations(quat3):
    A = quat3
    u = A.units()
    i, j = u["i"], u["j"]
    ij = A.mul(i, j)
    assert ij == (0, 0, 0, 1)
    assert A.mul(j, i) == A.neg(ij)
    assert A.mul(i, i) == A.scale(-1, A.one())
    assert A.inv(A.one()) == A.one()
    assert A.inv(i) == A.neg(i)


def test_traces_and_norms(quat3):
    A = quat3
    assert A.trd_q(A.one()) == A.d * A.e == 2
    assert A.nrd_f(A.units()["i"]) == (1,)
    assert A.nrd_f(A.units()["j"]) == (-3,)
    x = (1, 2, 3, 4)
    assert A.trd_q(x) + A.trd_q(A.neg(x)) == 0
    assert A.tr_q(x) == 2 * A.trd_q(x)
    assert A.nm_q(x) == A.nrd_q(x) ** 2


def test_type_ii_needs_indefinite():
    with pytest.raises(InvalidParameters):
        Algebra.type_ii([0, 1], [-1], [-1])  # Hamilton quaternions are definite


def test_split_algebra_zero_divisor():
    A = Algebra.type_ii([0, 1], [1], [1])  # M_2(Q)
    with pytest.raises(ZeroDivisor):
        A.inv((1, 1, 0, 0))  # 1 + i has reduced norm 0


def test_norm_sq(quat3):
    inv = std_inv(quat3)
    assert norm_sq_D(quat3, quat3.zero(), inv) == 0
    assert norm_sq_D(quat3, quat3.one(), inv) == 2
    assert norm_sq_D(quat3, quat3.units()["i"], inv) == 2


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_norm_of_one_is_de(name):
    A = algebra_by_name(name)
    assert norm_sq_D(A, A.one(), std_inv(A)) == A.d * A.e


def test_antisym_basis():
    assert antisym_basis(std_inv(algebra_by_name("Q(sqrt2)"))) == []
    q = algebra_by_name("(-1,3|Q)")
    minus = antisym_basis(std_inv(q))
    assert len(minus) == 1 and minus[0] in ((0, 1, 0, 0), (0, -1, 0, 0))
    assert len(antisym_basis(std_inv(algebra_by_name("(-1,11|Q(sqrt5))")))) == 2


def test_involution_rejects_nonpositive(quat3):
    # quaternion conjugation is an involution but not positive on an indefinite algebra
    conj = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    with pytest.raises(NotPositive):
        Involution.checked(quat3, conj)


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_identities_random(name):
    """Submultiplicativity, Nrd bound, D^- identities and trace symmetry."""
    A = algebra_by_name(name)
    inv = std_inv(A)
    rng = random.Random(name)
    de = A.d * A.e
    minus = antisym_basis(inv)
    for _ in range(200):
        a = A.random_element(rng, 7, 3)
        b = A.random_element(rng, 7, 3)
        na = norm_sq_D(A, a, inv)
        assert norm_sq_D(A, A.mul(a, b), inv) <= na * norm_sq_D(A, b, inv)
        assert Fraction(A.nrd_q(a)) ** 2 * de ** de <= Fraction(na) ** de
        assert A.trd_q(A.mul(a, b)) == A.trd_q(A.mul(b, a))
        assert A.trd_q(inv.apply(a)) == A.trd_q(a)
        if minus:
            u = A.scale(rng.randint(-4, 4), minus[rng.randrange(len(minus))])
            w = A.scale(rng.randint(-4, 4), minus[rng.randrange(len(minus))])
            assert A.in_center(A.mul(u, w))
            assert A.mul(A.mul(a, u), inv.apply(a)) == A.mul(A.from_field(A.nrd_f(a)), u)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=4, max_size=4))
def test_inverse_property(coords):
    A = algebra_by_name("(-1,7|Q)")
    x = tuple(coords)
    if not any(x):
        return
    assert A.mul(x, A.inv(x)) == A.one()
    assert A.mul(A.inv(x), x) == A.one()


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_real_split(name):
    A = algebra_by_name(name)
    inv = std_inv(A)
    sp = real_split(A, inv)
    res = sp.residuals(inv, samples=50, seed=1)
    assert max(res.values()) <= 1e-8
    assert np.allclose(sp.to_matrices(A.one()), np.array([np.eye(A.d)] * A.e))
    rng = random.Random(0)
    for _ in range(20):
        x = A.random_element(rng, 5)
        X = sp.to_matrices(x)
        dets = [float(np.linalg.det(Xs)) for Xs in X]
        nrd = A.nrd_f(x)
        for s, dv in enumerate(dets):
            ref = A.field.embed(nrd, s)
            assert abs(dv - ref) <= 1e-9 * max(1.0, abs(ref))


def test_real_split_i_is_antisymmetric(quat3):
    inv = std_inv(quat3)
    X = real_split(quat3, inv).to_matrices(quat3.units()["i"])[0]
    assert np.allclose(X.T, -X, atol=1e-9)
