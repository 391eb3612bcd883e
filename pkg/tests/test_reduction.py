from fractions import Fraction

import pytest

from herlat.algebra import AlgebraKind
from herlat.bounds import PowerBound, compare_power_bound, index_bound, table_constants
from herlat.errors import DegenerateForm
from herlat.hermitian import adjoint_involution, build_psi
from herlat.instancegen import algebra_by_name, corpus_entries, standard_instance
from herlat.orders import stabilizer_order
from herlat.reduction import (_case_c, hall_sigma, pattern_sigma, reduce_full,
                              select_pair)


def test_hall_sigma_examples():
    T, F = True, False
    assert hall_sigma([[T, F, F], [F, T, F], [F, F, T]]) == [0, 1, 2]
    assert hall_sigma([[F, T], [T, T]]) == [1, 0]
    with pytest.raises(DegenerateForm):
        hall_sigma([[F, F], [T, T]])


def test_hall_sigma_respects_pattern():
    pattern = [[False, True, False, False], [True, False, False, True],
               [False, False, True, True], [False, True, True, False]]
    sigma = hall_sigma(pattern)
    assert sorted(sigma) == [0, 1, 2, 3]
    assert all(pattern[i][sigma[i]] for i in range(4))


def test_select_pair():
    zero, one = (0,), (1,)
    gram = [[one, zero, zero], [zero, one, zero], [zero, zero, one]]
    assert select_pair([1.0, 2.0, 3.0], gram, [0, 1, 2]) == (0, 0)
    # transposition with equal norms and a vanishing diagonal
    gram = [[zero, one], [one, zero]]
    assert select_pair([1.0, 1.0], gram, [1, 0]) == (0, 1)
    # the shorter vector of the pair goes first
    assert select_pair([2.0, 1.0], gram, [1, 0]) == (1, 0)
    # a nonzero diagonal at the chosen index wins
    gram = [[zero, one], [one, one]]
    assert select_pair([2.0, 1.0], gram, [1, 0]) == (1, 1)


def test_table_constants():
    c = table_constants(1, 1, 2)
    assert compare_power_bound(2, c.index_mult)
    assert not compare_power_bound(Fraction(2001, 1000), c.index_mult)
    assert c.index_mult == PowerBound.of([(4, Fraction(1, 2))])
    q = table_constants(2, 1, 2)
    assert q.index_eta == 28
    assert q.psi_eta == 7
    with pytest.raises(ValueError):
        table_constants(3, 1, 1)


def test_pattern_sigma():
    assert pattern_sigma(AlgebraKind.TYPE_I, 4) == [1, 0, 3, 2]
    assert pattern_sigma(AlgebraKind.TYPE_II, 3) == [0, 1, 2]


def test_micro_reduces_with_case_b(micro):
    cert = reduce_full(micro)
    assert [t["case"] for t in cert.case_trace] == ["b"]
    assert len(cert.basis) == 1
    assert cert.eta_used == 1
    assert compare_power_bound(cert.index, cert.bounds["index"])
    # the D-Gram entry is a nonzero pure quaternion
    (val,), = cert.d_gram
    assert val[0] == 0 and any(val)


def test_type_i_standard_is_unimodular():
    A = algebra_by_name("Q(sqrt2)")
    inst = standard_instance(A, 2)
    cert = reduce_full(inst)
    assert cert.case_trace[0]["case"] == "a"
    assert cert.index == 1
    nrm = cert.norm_sq[0][1]
    assert nrm > 0 and compare_power_bound(nrm, cert.bounds["psi"].power(2))


def test_case_c_identity(quat3):
    """Hyperbolic pair in D^2: psi(w_i, w_i) = 0 and psi(w_i, w_j) = 1."""
    A = quat3
    inst = standard_instance(A, 2)
    inv = adjoint_involution(inst)
    form = build_psi(inst, inv)
    R = stabilizer_order(inst)
    i = A.units()["i"]
    u = A.add(A.add(A.one(), i), A.units()["j"])  # Nrd(u) = -1
    y = inv.apply(A.inv(A.mul(u, i)))
    wi = [1, 0, 0, 0] + [int(c) for c in u]
    wj = [0, 0, 0, 0] + [int(c) for c in y]
    assert form.psi(wi, wi) == A.zero()
    assert form.psi(wi, wj) == A.one()
    omega = A.scale(6, i)
    v1, v2 = _case_c(form, R, omega, wi, wj)
    wjp = [(b - a) // 2 for a, b in zip(v1, v2)]
    assert form.psi(wjp, wi) == A.scale(-12, i)
    assert form.psi(v1, v2) == A.zero()
    assert form.psi(v1, v1) == A.scale(24, i)
    with pytest.raises(ValueError):
        _case_c(form, R, None, wi, wj)


def test_case_c_occurs_in_corpus():
    entry = next(e for e in corpus_entries(192) if e.name == "(-1,3|Q)-m3-mix8-p2-s74")
    cert = reduce_full(entry.build())
    assert "c" in [t["case"] for t in cert.case_trace]
    assert compare_power_bound(cert.index, cert.bounds["index"])


@pytest.mark.parametrize("entry", corpus_entries(16, seed=40), ids=lambda e: e.name)
def test_reduce_full_corpus(entry):
    inst = entry.build()
    cert = reduce_full(inst)
    assert len(cert.basis) == inst.m
    d, e, m = inst.d, inst.e, inst.m
    assert compare_power_bound(cert.index, index_bound(d, e, m, cert.eta_used,
                                                       cert.disc_R, cert.disc_L))
    sigma = pattern_sigma(inst.algebra.kind, m)
    for k in range(m):
        assert any(cert.d_gram[k][sigma[k]])


def test_reduce_full_deterministic():
    inst = corpus_entries(30)[25].build()
    a, b = reduce_full(inst), reduce_full(inst)
    assert a.basis == b.basis and a.case_trace == b.case_trace


def test_eta_mode_disc_l(micro):
    cert = reduce_full(micro, eta_mode="discL")
    assert cert.eta_used == abs(micro.disc)
    with pytest.raises(ValueError):
        reduce_full(micro, eta_mode="bogus")
