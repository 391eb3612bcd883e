import pytest

from herlat.errors import InvalidParameters
from herlat.instancegen import (CORPUS_ALGEBRAS, algebra_by_name, corpus_entries, mix,
                                standard_instance)
from herlat.linalg import det


def test_micro_phi(micro):
    # Trd(x i y^dagger) on the basis {1, i, j, ij} of (-1,3|Q)
    assert [list(r) for r in micro.phi] == [
        [0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, -6], [0, 0, 6, 0]]
    assert micro.disc == 144


def test_rational_m2_is_standard_symplectic():
    inst = standard_instance(algebra_by_name("Q"), 2)
    assert [list(r) for r in inst.phi] == [[0, 1], [-1, 0]]
    assert inst.disc == 1


def test_standard_rejects_bad_parameters(quat3):
    with pytest.raises(InvalidParameters):
        standard_instance(algebra_by_name("Q"), 3)
    with pytest.raises(InvalidParameters):
        standard_instance(quat3, 0)
    with pytest.raises(InvalidParameters):
        standard_instance(quat3, 7)


def test_mix_zero_steps_is_identity(micro):
    out = mix(micro, seed=5, steps=0)
    assert out.phi == micro.phi and out.lattice == micro.lattice
    assert out.action == micro.action


def test_mix_preserves_disc(quat3):
    inst = standard_instance(quat3, 2)
    out = mix(inst, seed=9, steps=20)
    assert out.disc == inst.disc
    assert abs(det(out.lattice)) == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sublattice_scales_disc(quat3, p):
    inst = standard_instance(quat3, 2)
    out = mix(inst, seed=4, steps=3, sublattice=(p, 1))
    index = abs(det(out.lattice))
    ratio = out.disc / inst.disc
    assert ratio == index * index
    k = 0
    while index % p == 0:
        index //= p
        k += 1
    assert index == 1 and k % 4 == 0 and k > 0


def test_sublattice_prime_checked(micro):
    with pytest.raises(InvalidParameters):
        mix(micro, seed=0, steps=0, sublattice=(7, 1))


def test_corpus_entries_are_deterministic_and_valid():
    a, b = corpus_entries(40, seed=3), corpus_entries(40, seed=3)
    assert a == b
    assert len({e.name for e in a}) == 40
    names = {s.name for s in CORPUS_ALGEBRAS}
    for e in a[:20]:
        assert e.algebra in names
        inst = e.build()
        assert inst.m == e.m and inst.disc != 0


def test_generation_is_reproducible(quat3):
    inst = standard_instance(quat3, 2)
    one = mix(inst, seed=12, steps=8, sublattice=(3, 1))
    two = mix(inst, seed=12, steps=8, sublattice=(3, 1))
    assert one.lattice == two.lattice and one.phi == two.phi
