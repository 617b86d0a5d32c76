import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from submax.objectives import WeightedGraph  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def triangle():
    return WeightedGraph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def configs_dir():
    return ROOT / "configs"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
