import sys
from pathlib import Path

import numpy as np
import pytest

from stieltjes import catalog

sys.path.insert(0, str(Path(__file__).parent))

BIMODAL_ZETAS = {0.1 + 1.6j: 2, -0.3 - 1.5j: 2, -2 + 0.5j: 1, 0.2 + 0.4j: 1}


@pytest.fixture(scope="session")
def bimodal():
    return catalog.bimodal_jacobi()


@pytest.fixture(scope="session")
def two_cut():
    return catalog.two_cut()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
