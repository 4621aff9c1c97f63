import pytest

from circpart.bounds import gamma_theta_kgon
from circpart.construct import build_partition, optimal_gamma


@pytest.fixture(scope="session")
def triangle():
    return build_partition(3, 1.5)


@pytest.fixture(scope="session")
def square():
    return build_partition(4, 1.20711)


@pytest.fixture(scope="session")
def pentagon():
    return build_partition(5, gamma_theta_kgon(5))


@pytest.fixture(scope="session")
def hexagon():
    return build_partition(6, optimal_gamma(6))
