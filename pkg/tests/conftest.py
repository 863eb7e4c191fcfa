import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def P():
    from polyzero.exactpoly import ExactPolynomial

    return lambda *c: ExactPolynomial(tuple(c))


ACCEPTANCE_LINES = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, {})

    def record(n: int, title: str, ok: bool, detail: str) -> None:
        line = f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines[n] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
