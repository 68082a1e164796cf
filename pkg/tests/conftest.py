import pytest

from umbilab import build_grid

# (criterion number, verdict, detail) collected by the acceptance module
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def grid32():
    return build_grid(32, 64)


@pytest.fixture(scope="session")
def grid64():
    return build_grid(64, 128)


@pytest.fixture(scope="session")
def grid128():
    return build_grid(128, 256)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
