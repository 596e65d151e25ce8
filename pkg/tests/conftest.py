import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


@pytest.fixture
def repo_root():
    return Path(__file__).resolve().parents[1]


@pytest.fixture
def criterion():
    """Record one acceptance line; returns the pass flag so tests can assert on it."""
    def record(order, title, passed, detail):
        status = "PASS" if passed else "FAIL"
        _CRITERIA.append((order, f"[{status}] {order:2d}. {title}: {detail}"))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
