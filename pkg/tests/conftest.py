import pytest

from speedup_lab.subshift import JumpFunction
from speedup_lab.symbols import Substitution
from speedup_lab.systems import coboundary_example, parity_example

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def parity():
    return parity_example()


@pytest.fixture(scope="session")
def divergent():
    return coboundary_example()


@pytest.fixture
def identity2():
    return Substitution([(0,), (1,)])


@pytest.fixture
def one():
    return JumpFunction.constant(1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
