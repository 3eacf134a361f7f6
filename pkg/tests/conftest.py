import pytest

from ramfiltre import constants
from ramfiltre.engine import clear_caches


@pytest.fixture(autouse=True)
def _pristine_constants():
    """Every test starts and ends with the unmutated constants and a cold cache."""
    constants.set_mutation(None)
    clear_caches()
    yield
    constants.set_mutation(None)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
