import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from lhedof.core import GrayImage  # noqa: E402
from lhedof.pgm import read_pgm  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "data")

N1 = np.array([[10, 12, 25], [25, 36, 47], [47, 65, 77]])
N2 = np.array([[10, 12, 25], [25, 25, 47], [56, 65, 25]])


@pytest.fixture(scope="session")
def cameraman():
    """128x128 block-averaged cameraman test image."""
    return read_pgm(os.path.join(DATA, "cameraman128.pgm"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_image(rng, shape, levels=256):
    return GrayImage(rng.integers(0, levels, shape), levels)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
