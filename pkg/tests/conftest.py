import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from macpolar.mac import Mac  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@st.composite
def macs(draw, max_m=3, max_outputs=4, min_m=1):
    """Random MACs with a sprinkling of exact zeros."""
    m = draw(st.integers(min_m, max_m))
    k = draw(st.integers(2, max_outputs))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    t = rng.dirichlet(np.full(k, 0.7), size=1 << m)
    if draw(st.booleans()):
        t[rng.random(t.shape) < 0.25] = 0.0
        t[:, 0] += (t.sum(axis=1) == 0)
        t /= t.sum(axis=1, keepdims=True)
    return Mac(m, t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
