import pytest

_CRITERIA = {}


@pytest.fixture
def record():
    """Record one acceptance line: record(number, passed, detail)."""

    def _record(number, passed, detail=""):
        if number in _CRITERIA:
            prev_ok, prev_detail = _CRITERIA[number]
            _CRITERIA[number] = (prev_ok and bool(passed), prev_detail + "; " + detail)
        else:
            _CRITERIA[number] = (bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
