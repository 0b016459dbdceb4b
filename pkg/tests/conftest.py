import pytest

from nearspan.generators import complete, cycle, path
from nearspan.graph import Graph


@pytest.fixture
def k16():
    return complete(16)


@pytest.fixture
def c64():
    return cycle(64)


@pytest.fixture
def path10():
    return path(10)


@pytest.fixture
def star6():
    return Graph(6, [(0, leaf) for leaf in range(1, 6)])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
