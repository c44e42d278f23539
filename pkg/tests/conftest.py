from pathlib import Path

import pytest
from hypothesis import strategies as st

from popmatch.generate import random_instance
from popmatch.model import augment_last_resorts, matching_from_names, read_instance

DATA = Path(__file__).resolve().parent.parent / "data"

# golden matchings for data/ex1.txt
M_EQ1 = [("a1", "p6"), ("a2", "p1"), ("a3", "p8"), ("a4", "p2"), ("a5", "p3"), ("a6", "p9"), ("a7", "p4")]
M_EQ2 = [("a1", "p6"), ("a2", "p1"), ("a3", "p8"), ("a4", "p2"), ("a5", "p4"), ("a6", "p3"), ("a7", "p5")]


@pytest.fixture(scope="session")
def ex1():
    return read_instance(DATA / "ex1.txt")


@pytest.fixture(scope="session")
def ex1_aug(ex1):
    return augment_last_resorts(ex1)


@pytest.fixture(scope="session")
def m_eq1(ex1_aug):
    return matching_from_names(ex1_aug, M_EQ1)


@pytest.fixture(scope="session")
def m_eq2(ex1_aug):
    return matching_from_names(ex1_aug, M_EQ2)


@st.composite
def instances(draw, max_agents=5, max_posts=5):
    """Random instances through the project's own generator, seeded by hypothesis."""
    return random_instance(
        draw(st.integers(1, max_agents)),
        draw(st.integers(1, max_posts)),
        draw(st.sampled_from([0.0, 0.3, 0.6])),
        seed=draw(st.integers(0, 2**32 - 1)),
    )


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
