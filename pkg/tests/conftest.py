import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))
# The evaluator raises the limit on first use; do it up front so hypothesis
# does not see it change mid-test.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240611,
                     help="seed for the bulk generated corpora")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


# One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
