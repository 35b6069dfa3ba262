import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture(scope="session")
def acceptance(request):
    """Callable recording one status line per acceptance criterion."""
    lines = request.config.stash[_LINES]

    def record(number, title, status, detail=""):
        line = f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        lines.append(line)
        print(line)
        return line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
