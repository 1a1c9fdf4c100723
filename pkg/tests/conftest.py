import numpy as np
import pytest

from gl_lab.config import validate_config
from gl_lab.runner import run

STANDARD_SWEEP = """
domain: {kind: UnitDisk, resolution: 64}
boundary: {type: cos, amplitude: 0.5}
problem: Single
epsilons: [0.4, 0.2, 0.1, 0.05]
"""

PAIR_SWEEP = """
domain: {kind: UnitDisk, resolution: 64}
boundary:
  - {type: cos, amplitude: 0.4}
  - {type: sin, amplitude: 0.4}
problem: %s
epsilons: [0.4, 0.2, 0.1, 0.05]
"""


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _run(text, out):
    cfg = validate_config(text)
    return cfg, run(cfg, out)


@pytest.fixture(scope="session")
def standard_run(tmp_path_factory):
    """Disk n=64, g = exp(0.5 i cos theta), eps 0.4 -> 0.05, via the runner."""
    return _run(STANDARD_SWEEP, tmp_path_factory.mktemp("standard"))


@pytest.fixture(scope="session")
def symmetric_run(tmp_path_factory):
    return _run(PAIR_SWEEP % "SymmetricPair", tmp_path_factory.mktemp("sym"))


@pytest.fixture(scope="session")
def nonsymmetric_run(tmp_path_factory):
    return _run(PAIR_SWEEP % "NonSymmetricPair", tmp_path_factory.mktemp("nonsym"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
