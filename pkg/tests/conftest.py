import pytest

from herlat.hermitian import adjoint_involution, build_psi
from herlat.instancegen import algebra_by_name, standard_instance
from herlat.orders import stabilizer_order


@pytest.fixture(scope="session")
def quat3():
    return algebra_by_name("(-1,3|Q)")


@pytest.fixture(scope="session")
def micro(quat3):
    """(-1,3|Q) acting on itself, m = 1."""
    return standard_instance(quat3, 1)


@pytest.fixture(scope="session")
def micro_form(micro):
    return build_psi(micro, adjoint_involution(micro))


@pytest.fixture(scope="session")
def micro_order(micro):
    return stabilizer_order(micro)
