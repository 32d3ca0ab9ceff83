import numpy as np
import pytest

from epochbandit.instances import random_ergodic_chain


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chains(rng):
    return [random_ergodic_chain(int(rng.integers(2, 7)), rng, sparsity=0.3) for _ in range(20)]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
