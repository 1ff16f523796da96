import numpy as np
import pytest
from hypothesis import strategies as st

from cubetti.grid import VoxelGrid


@st.composite
def small_grids(draw, max_side=4, min_side=1):
    dims = tuple(draw(st.integers(min_side, max_side)) for _ in range(3))
    bits = draw(st.lists(st.booleans(), min_size=int(np.prod(dims)), max_size=int(np.prod(dims))))
    return VoxelGrid(np.array(bits, dtype=bool).reshape(dims))


codes = st.integers(0, 255)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
