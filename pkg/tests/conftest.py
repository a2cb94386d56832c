import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Append one PASS/FAIL line per acceptance criterion; printed in the summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def report(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
