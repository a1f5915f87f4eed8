import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Log one ``PASS``/``FAIL`` line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def _record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
