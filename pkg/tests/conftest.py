import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(label: str, passed: bool, measured: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} {label}: {measured}"
        _LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
