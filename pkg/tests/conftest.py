import pytest
from hypothesis import HealthCheck, settings

from shadowbound.constructions import goldfarb_cube, unit_cube
from shadowbound.exact import QMatrix, QVector
from shadowbound.polytope import HPolytope, vertex_from_basis

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def make_square() -> HPolytope:
    # rows -x1<=0, -x2<=0, x1<=1, x2<=1 (indices 0..3)
    A = QMatrix([[-1, 0], [0, -1], [1, 0], [0, 1]])
    return HPolytope(A, QVector([0, 0, 1, 1]))


def square_vertex(P, x, y):
    return vertex_from_basis(P, [2 if x else 0, 3 if y else 1])


@pytest.fixture
def square():
    return make_square()


@pytest.fixture
def cube3():
    return unit_cube(3)


@pytest.fixture(scope="session")
def goldfarb3():
    return goldfarb_cube(3)
