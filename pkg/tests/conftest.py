import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""
    def record(name, ok, detail=""):
        _LINES.setdefault(name, []).append((bool(ok), detail))
        print(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_LINES):
        parts = _LINES[name]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
