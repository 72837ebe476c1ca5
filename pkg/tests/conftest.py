import pytest

_LINES = []


@pytest.fixture
def verdict():
    """Record one acceptance line; returns the pass flag unchanged."""
    def record(label, ok, detail=""):
        _LINES.append(f"{label:<44s} {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
