import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qbent.gf2 import BitMatrix  # noqa: E402

# The six matrices fixing x1*x2+x3 at n=3, written out by hand.
STABILIZER_X1X2_X3 = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
    [[1, 1, 1], [0, 1, 0], [0, 0, 1]],
    [[1, 1, 1], [1, 0, 0], [0, 0, 1]],
    [[0, 1, 0], [1, 1, 1], [0, 0, 1]],
    [[1, 0, 0], [1, 1, 1], [0, 0, 1]],
]


@pytest.fixture
def stabilizer_fixture():
    return [BitMatrix.from_lists(m) for m in STABILIZER_X1X2_X3]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# label -> list of outcomes, one per test carrying the label
ACCEPTANCE: dict[str, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        ACCEPTANCE.setdefault(mark.args[0], []).append(rep.passed)


def _order(label):
    head = label.split()[0]
    return int("".join(c for c in head if c.isdigit())), head


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=_order):
        status = "PASS" if all(ACCEPTANCE[label]) else "FAIL"
        terminalreporter.write_line(f"{status} {label}")
