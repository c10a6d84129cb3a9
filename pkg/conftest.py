from pathlib import Path

import pytest

from ccic.boolfun import enumerate_functions, generate_named
from ccic.witness import context_for

DATA_DIR = Path(__file__).parent / "data" / "functions"


@pytest.fixture
def neq1():
    return generate_named("NEQ", 1)


@pytest.fixture
def eq1():
    return generate_named("EQ", 1)


@pytest.fixture
def neq2():
    return generate_named("NEQ", 2)


@pytest.fixture
def neq3():
    return generate_named("NEQ", 3)


@pytest.fixture
def const1_1():
    return generate_named("CONST1", 1)


@pytest.fixture
def const1_2():
    return generate_named("CONST1", 2)


@pytest.fixture
def const0_1():
    return generate_named("CONST0", 1)


@pytest.fixture
def ctx_of():
    return context_for


@pytest.fixture(scope="session")
def all_n1():
    return list(enumerate_functions(1))


@pytest.fixture(scope="session")
def named_n2():
    names = ("NEQ", "EQ", "DISJ", "CONST0", "CONST1")
    return [generate_named(name, 2) for name in names] + [generate_named("RANDOM", 2, s) for s in range(5)]


@pytest.fixture
def data_dir():
    return DATA_DIR
