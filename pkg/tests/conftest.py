import pytest

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one acceptance check; the summary hook prints all of them."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _RESULTS.append((name, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
