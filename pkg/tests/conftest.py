import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import A_ab  # noqa: E402
from ocabstract.core import make_oca  # noqa: E402


@pytest.fixture
def anbn():
    return A_ab()


@pytest.fixture
def rng():
    return random.Random(2024)


@pytest.fixture
def examples_dir():
    return ROOT / "examples"


@pytest.fixture
def ab_only():
    """Accepts exactly the word ab using no-op moves."""
    return make_oca("simple", [("p", "a", 0, "q"), ("q", "b", 0, "r")], "p", ["r"])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
