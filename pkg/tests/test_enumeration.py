import itertools
import random

import numpy as np
import pytest

from herlat.enumeration import (FloatGram, hermite_bound, lll_gram, lll_gram_exact,
                                shortest_outside, short_vectors)
from herlat.errors import EnumerationBudgetExceeded
from herlat.linalg import ZLattice, det_int, mat_mul, transpose


def _random_lattice(rng, n):
    while True:
        B = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
        if det_int(B):
            return B


def test_hermite_bound():
    assert [hermite_bound(n) for n in (1, 2, 16)] == [1, 2, 16]


def test_float_gram_rejects_indefinite():
    with pytest.raises(np.linalg.LinAlgError):
        FloatGram(np.diag([1.0, -1.0]))


def test_short_vectors_examples():
    I2 = FloatGram(np.eye(2))
    assert [v for v, _ in short_vectors(ZLattice.standard(2), I2, 1)] == [(1, 0), (0, 1)]
    assert short_vectors(ZLattice.from_basis([[2, 0], [0, 2]]), I2, 1) == []
    got = short_vectors(ZLattice.standard(2), FloatGram(np.diag([1.0, 5.0])), 4)
    assert [v for v, _ in got] == [(1, 0), (2, 0)]


def test_short_vectors_sorted_and_signed():
    rng = random.Random(0)
    B = _random_lattice(rng, 3)
    out = short_vectors(ZLattice.from_basis(B), FloatGram(np.eye(3)), 30)
    norms = [nrm for _, nrm in out]
    assert norms == sorted(norms)
    coords = [c for c, _ in out]
    assert len(set(coords)) == len(coords)
    assert all(next(x for x in c if x) > 0 for c in coords)


def test_short_vectors_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        short_vectors(ZLattice.standard(3), FloatGram(np.eye(3)), 50, budget=10)


def test_first_minimum_matches_box_search():
    rng = random.Random(1)
    for _ in range(20):
        B = np.array(_random_lattice(rng, 4), dtype=float)
        G = FloatGram(B @ B.T)
        best = min(float(np.array(x) @ G.matrix @ np.array(x))
                   for x in itertools.product(range(-6, 7), repeat=4) if any(x))
        out = short_vectors(ZLattice.standard(4), G, best * (1 + 1e-9))
        assert out and abs(out[0][1] - best) <= 1e-9 * best


def test_lll_gram_unimodular_and_consistent():
    rng = random.Random(2)
    for _ in range(20):
        B = np.array(_random_lattice(rng, 5), dtype=float)
        G = B @ B.T
        T, Gr = lll_gram(G)
        assert abs(det_int(T)) == 1
        Tf = np.array(T, dtype=float)
        assert np.allclose(Tf @ G @ Tf.T, Gr)
        # Lovasz-style sanity: first vector no longer than the shortest input row
        assert Gr[0, 0] <= np.min(np.diag(G)) + 1e-9


def test_lll_gram_exact():
    rng = random.Random(3)
    for _ in range(20):
        B = _random_lattice(rng, 5)
        G = mat_mul(B, transpose(B))
        T = lll_gram_exact(G)
        assert abs(det_int(T)) == 1
        Gr = mat_mul(mat_mul(T, G), transpose(T))
        assert Gr[0][0] <= min(G[k][k] for k in range(5))
    with pytest.raises(ValueError):
        lll_gram_exact([[1, 2], [2, 1]])


def test_lll_gram_exact_ill_conditioned():
    # entries near 1e40 would overwhelm a double-precision LLL
    big = 10**40
    G = [[big, big - 1], [big - 1, big]]
    T = lll_gram_exact(G)
    Gr = mat_mul(mat_mul(T, G), transpose(T))
    assert min(Gr[0][0], Gr[1][1]) == 2


def test_shortest_outside():
    G = np.diag([1.0, 2.0, 3.0])
    assert shortest_outside(G, []) == ((1, 0, 0), 1.0)
    v, nrm = shortest_outside(G, [[1, 0, 0]])
    assert v == (0, 1, 0) and nrm == 2.0
    v, nrm = shortest_outside(G, [[1, 0, 0], [0, 1, 0]])
    assert v[2] != 0 and nrm == 3.0
    with pytest.raises(ValueError):
        shortest_outside(G, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_shortest_outside_against_brute_force():
    rng = random.Random(4)
    for _ in range(30):
        B = np.array(_random_lattice(rng, 4), dtype=float)
        G = B @ B.T
        W = [[rng.randint(-2, 2) for _ in range(4)] for _ in range(rng.randint(1, 2))]
        Wm = np.array(W, dtype=float)
        rk = np.linalg.matrix_rank(Wm)

        def outside(x):
            return np.linalg.matrix_rank(np.vstack([Wm, x])) > rk

        best = min(float(np.array(x) @ G @ np.array(x))
                   for x in itertools.product(range(-4, 5), repeat=4) if any(x) and outside(np.array(x)))
        v, nrm = shortest_outside(G, W)
        assert outside(np.array(v, dtype=float))
        assert nrm <= best * (1 + 1e-9)
