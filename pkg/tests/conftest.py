import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion_line(request):
    """Record one pass/fail line for the end-of-run summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(text):
        print(text)
        lines.append(text)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split(":")[0]):
            terminalreporter.write_line(line)
