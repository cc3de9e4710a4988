import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from augkmeans.dataset import bench_spec, generate_mixture  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def bench():
    return generate_mixture(bench_spec())


@pytest.fixture
def blobs_1d():
    X = np.array([0.0, 0.1, -0.1, 10.0, 10.1, 9.9]).reshape(-1, 1)
    truth = np.array([0, 0, 0, 1, 1, 1])
    return X, truth


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
