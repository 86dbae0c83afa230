import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from wtasim.semiring import BOOL, INT, NAT, RAT
from wtasim.wta import RankedAlphabet, Wta

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

seeds = st.integers(min_value=0, max_value=2**32 - 1)
exact_carriers = st.sampled_from([NAT, INT, RAT])
ring_carriers = st.sampled_from([INT, RAT])

BINARY = RankedAlphabet([("alpha", 0), ("sigma", 2)])


def one_state(weight, semiring=NAT, name="q"):
    """alpha -> 1, sigma(q, q) -> weight, final 1."""
    return Wta.build(semiring, BINARY, [name],
                     {("alpha", (), name): 1, ("sigma", (name, name), name): weight},
                     {name: 1})


@pytest.fixture
def m_one():
    return one_state(1)


@pytest.fixture
def m_two():
    return one_state(2)


@pytest.fixture
def rng():
    return random.Random(12345)


def values(semiring, lo=-6, hi=6):
    if semiring is BOOL:
        return st.integers(0, 1)
    if semiring is NAT:
        return st.integers(0, hi)
    if semiring is INT:
        return st.integers(lo, hi)
    return st.fractions(min_value=lo, max_value=hi, max_denominator=5)


# PASS/FAIL lines from tests/test_acceptance.py, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
