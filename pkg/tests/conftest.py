import pytest

from tests.helpers import make_village, write_village_files


@pytest.fixture
def triangle_pendant():
    return make_village([('a', 'b'), ('b', 'c'), ('a', 'c'), ('c', 'd')])


@pytest.fixture
def two_cliques():
    return make_village([('a', 'b'), ('b', 'c'), ('a', 'c'),
                         ('d', 'e'), ('e', 'f'), ('d', 'f'), ('c', 'd')])


@pytest.fixture
def path_abc():
    return make_village([('a', 'b'), ('b', 'c')])


@pytest.fixture
def star():
    return make_village([('x', leaf) for leaf in 'abcd'])


@pytest.fixture
def six_cycle():
    nodes = 'abcdef'
    return make_village([(nodes[i], nodes[(i + 1) % 6]) for i in range(6)])


@pytest.fixture
def triangle_pendant_files(tmp_path):
    return write_village_files(
        tmp_path,
        ['a,ha,v1,,', 'b,hb,v1,,', 'c,hc,v1,,', 'd,hd,v1,,'],
        ['v1,a,b', 'v1,b,c', 'v1,a,c', 'v1,c,d'],
    )
