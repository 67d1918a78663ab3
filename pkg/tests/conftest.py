import pytest

from spheregate.permgroup import closure, perm_from_cycles
from spheregate.rules import load_axiom_table
from spheregate.schemas import RunConfig


def sym(n):
    return closure([perm_from_cycles([(0, 1)], n), perm_from_cycles([tuple(range(n))], n)], name=f"S{n}")


def alt(n):
    return closure([perm_from_cycles([(0, 1, i)], n) for i in range(2, n)], name=f"A{n}")


@pytest.fixture(scope="session")
def table():
    return load_axiom_table()


@pytest.fixture
def config():
    return RunConfig()
