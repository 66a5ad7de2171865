import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from harper_ratchet.model import HBAR_GOLDEN, ModelParams  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def chaotic():
    """Chaotic case: K = 2L = 3, cos q + sin 2q, golden hbar."""
    return ModelParams(3.0, 1.5, 0.0, 0.0, 1.0, HBAR_GOLDEN)


@pytest.fixture
def symmetric():
    """sin q + cos 2q at K = 2L = 1."""
    return ModelParams(1.0, 0.5, math.pi / 2, math.pi / 2, 1.0, HBAR_GOLDEN)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
