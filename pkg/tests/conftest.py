import pytest

import support


@pytest.fixture
def square():
    return support.cube(2)


@pytest.fixture
def cube3():
    return support.cube(3)


@pytest.fixture
def octahedron():
    return support.cross_polytope(3)


@pytest.fixture
def hexagon():
    return support.hexagon()


@pytest.fixture
def triangle_o():
    return support.triangle_origin()


@pytest.fixture
def standard_triangle():
    return support.standard_triangle()
