import pytest

from collision_transform.characters import build_character_table
from collision_transform.residue_ring import build_units_group

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


_tables = {}


def table(b, ell=1):
    if (b, ell) not in _tables:
        _tables[b, ell] = build_character_table(build_units_group(b, ell))
    return _tables[b, ell]


@pytest.fixture(scope="session")
def get_table():
    return table
