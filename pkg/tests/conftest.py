import pytest
from hypothesis import HealthCheck, settings

from heckeq import builtin_graph

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def dihedral():
    return builtin_graph("dihedral")


@pytest.fixture(scope="session")
def square():
    return builtin_graph("square")


@pytest.fixture(scope="session")
def pentagon():
    return builtin_graph("pentagon")


@pytest.fixture(scope="session")
def graphs(dihedral, square, pentagon):
    return (dihedral, square, pentagon)
