import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herlat.errors import NotASublattice, RankMismatch
from herlat.linalg import (ZLattice, det, det_int, elementary_divisors, hnf, identity,
                           integer_left_kernel, integral_solutions, inverse, kernel_in_lattice,
                           mat_mul, nullspace, rank, row_lattice_basis, saturated_kernel,
                           snf_index)

small_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=1, max_size=6))


def _is_hnf(H):
    last = -1
    for row in H:
        nz = [k for k, x in enumerate(row) if x]
        if not nz:
            continue
        c = nz[0]
        assert c > last and row[c] > 0
        last = c
    return True


def test_hnf_examples():
    H, U = hnf(identity(3))
    assert H == identity(3) and U == identity(3)
    assert hnf([[2, 0], [0, 3]])[0] == [[2, 0], [0, 3]]
    H, _ = hnf([[4, 6], [2, 2]])
    assert abs(det_int(H)) == 4


def test_hnf_random_thousand():
    rng = random.Random(0)
    for _ in range(1000):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-50, 50) for _ in range(c)] for _ in range(r)]
        H, U = hnf(M)
        assert mat_mul(U, M) == H
        assert abs(det_int(U)) == 1
        assert _is_hnf(H)


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_row_lattice_basis_matches_hnf(M):
    H, _ = hnf(M)
    assert row_lattice_basis(M, len(M[0])) == [h for h in H if any(h)]


def test_row_lattice_basis_tall_full_rank():
    # exercises the modular path: many rows, full column rank
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 6)
        M = [[rng.randint(-9, 9) * rng.choice((1, 1000)) for _ in range(n)] for _ in range(3 * n)]
        H, _ = hnf(M)
        assert row_lattice_basis(M, n) == [h for h in H if any(h)]


def test_snf_index_examples():
    Z2 = ZLattice.standard(2)
    assert snf_index(Z2, ZLattice.from_basis([[2, 0], [0, 3]])) == 6
    assert snf_index(Z2, Z2) == 1
    assert snf_index(Z2, ZLattice.from_basis([[2, 1], [0, 2]])) == 4


def test_snf_index_errors():
    Z2 = ZLattice.standard(2)
    with pytest.raises(NotASublattice):
        snf_index(ZLattice.from_basis([[2, 0], [0, 2]]), Z2)
    with pytest.raises(RankMismatch):
        snf_index(Z2, ZLattice.from_basis([[1, 0]], 2))


def test_snf_index_equals_det_on_square():
    rng = random.Random(1)
    for _ in range(100):
        B = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        if det_int(B) == 0:
            continue
        assert snf_index(ZLattice.standard(3), ZLattice.from_basis(B)) == abs(det_int(B))


def test_elementary_divisors_divide():
    assert elementary_divisors([[2, 0], [0, 3]]) == [1, 6]
    assert elementary_divisors([[4, 6], [2, 2]]) == [2, 2]


def test_kernel_in_lattice_examples():
    Z2 = ZLattice.standard(2)
    assert kernel_in_lattice(Z2, [[0], [0]]).basis == Z2.basis
    assert kernel_in_lattice(Z2, [[1, 0], [0, 1]]).rank == 0
    K = kernel_in_lattice(Z2, [[1], [1]])
    assert K.rank == 1 and [abs(x) for x in K.basis[0]] == [1, 1]
    assert sum(K.basis[0]) == 0


def test_kernel_is_saturated():
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(2, 5)
        L = ZLattice.standard(n)
        w = rng.randint(1, n - 1)
        M = [[rng.randint(-4, 4) for _ in range(w)] for _ in range(n)]
        K = kernel_in_lattice(L, M)
        assert all(x == 0 for row in mat_mul(K.basis, M) for x in row)
        full = ZLattice.from_generators(integer_left_kernel(M)[0], n)
        assert K.rank == full.rank
        if K.rank:
            assert snf_index(full, K) == 1


def test_saturated_kernel_against_hnf_kernel():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 6)
        w = rng.randint(1, n)
        A = [[rng.randint(-20, 20) for _ in range(w)] for _ in range(n)]
        K = saturated_kernel(A)
        ref = integer_left_kernel(A)[0]
        assert len(K) == len(ref)
        if K:
            assert ZLattice.from_generators(K, n).basis == ZLattice.from_generators(ref, n).basis


def test_saturated_kernel_large_prime_index():
    # index with a 20-digit prime factor needs real factoring, not trial division
    p = 10**19 + 51
    A = [[p], [1], [0]]
    K = saturated_kernel(A)
    assert all(sum(c * a[0] for c, a in zip(row, A)) == 0 for row in K)
    assert ZLattice.from_generators(K, 3).basis == ZLattice.from_generators(integer_left_kernel(A)[0], 3).basis


def test_integral_solutions():
    # {x : 2x in Z, x/3 + y in Z}
    sol = integral_solutions([[2, 0], [Fraction(1, 3), 1]])
    L = ZLattice.from_basis(sol)
    assert L.contains([Fraction(1, 2), Fraction(-1, 6)])
    assert not L.contains([Fraction(1, 4), 0])


def test_rational_helpers():
    A = [[1, 2], [3, 4]]
    assert det(A) == -2
    assert mat_mul(A, inverse(A)) == identity(2)
    assert rank([[1, 2], [2, 4]]) == 1
    v = nullspace([[1, 2], [2, 4]])[0]
    assert v[0] + 2 * v[1] == 0
