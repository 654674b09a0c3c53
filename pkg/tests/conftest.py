import numpy as np
import pytest

from pathfinder import numerics as nm


@pytest.fixture(params=nm.available_backends())
def backend(request):
    """Run a test once per kernel backend, restoring the default afterwards."""
    previous = nm.BACKEND
    nm.set_backend(request.param)
    yield request.param
    nm.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def scan_finite_text(path):
    """Every numeric token of a CSV/JSON file parses to a finite float."""
    import re

    text = open(path).read()
    assert not re.search(r"\b(nan|inf|infinity)\b", text, re.IGNORECASE), path
    return text


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][3:])):
            terminalreporter.write_line(line)
