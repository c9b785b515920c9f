import mpmath
import pytest


@pytest.fixture
def mp256():
    with mpmath.workprec(256):
        yield mpmath.mp


def mpf(q):
    """Exact conversion of a Fraction into the current mpmath precision."""
    return mpmath.mpf(q.numerator) / q.denominator


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def add(line: str) -> None:
        print(line)
        lines.append(line)

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
