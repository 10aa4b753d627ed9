import pytest

from bloch_k2.apnum import PrecisionContext
from bloch_k2.nfield import create_field, cyclotomic_field

POLYS = {
    "cubic_d83": [2, 1, 1, 1],
    "cubic_d59": [2, -1, -1, 1],
    "cubic_d104": [2, -1, 0, 1],
    "quartic_d283a": [1, 1, -2, 0, 1],
    "quartic_d283b": [-1, 0, 0, 1, 1],
}


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(38)


@pytest.fixture(scope="session")
def fields():
    return {name: create_field(poly, name=name) for name, poly in POLYS.items()}


@pytest.fixture(scope="session")
def cyclo5():
    return cyclotomic_field(5)


@pytest.fixture(scope="session")
def cyclo3():
    return cyclotomic_field(3)


def pytest_terminal_summary(terminalreporter):
    try:
        from tests.test_acceptance import SUMMARY
    except ImportError:
        return

    if not SUMMARY:
        return
    terminalreporter.section("acceptance criteria")
    for line in SUMMARY:
        terminalreporter.write_line(line)
