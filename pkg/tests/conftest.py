import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from encoded_gates import kernels  # noqa: E402
from encoded_gates.codes import code_registry  # noqa: E402


@pytest.fixture
def three():
    return code_registry("three_bit")


@pytest.fixture
def seven():
    return code_registry("seven_bit")


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run a test once per importable kernel backend."""
    previous = kernels.BACKEND
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = sorted(getattr(module, "LINES", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
