import pytest

_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, passed, detail):
        _ACCEPTANCE.append((number, "PASS" if passed else "FAIL", detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {verdict}  {detail}")
