import hypothesis.extra.numpy as npst
import numpy as np
import pytest
from hypothesis import strategies as st

from mclim.catalog import bundled

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def paper6():
    return bundled("paper_6state")


@pytest.fixture(scope="session")
def healthcare():
    return bundled("healthcare")


@pytest.fixture(scope="session")
def same_a():
    return bundled("same_limit_a")


@pytest.fixture(scope="session")
def same_b():
    return bundled("same_limit_b")


@pytest.fixture(scope="session")
def swap():
    return bundled("swap")


@st.composite
def stochastic_rows(draw, min_size=2, max_size=10):
    """Probability vectors with at least two positive cells and some exact zeros."""
    size = draw(st.integers(min_value=min_size, max_value=max_size))
    weights = draw(
        npst.arrays(
            np.float64,
            (size,),
            elements=st.one_of(st.just(0.0), st.floats(min_value=0.01, max_value=100.0)),
        )
    )
    if np.count_nonzero(weights) < 2:
        weights[:2] = [1.0, 2.0]
    return (weights / weights.sum()).tolist()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {title} -- {detail}")
