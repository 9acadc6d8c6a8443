from __future__ import annotations

import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PRIMES = (2, 3, 5)

# small windows (p, r, l) reused across modules
SMALL_GRIDS = [(2, 1, 0), (2, 2, -1), (2, 0, -3), (3, 1, -1), (3, 2, 0), (5, 1, -1), (2, 3, 0), (3, 0, -2)]


@st.composite
def grids(draw, max_size: int = 81):
    from padic_spectral import enumerate_cosets

    p = draw(st.sampled_from(PRIMES))
    depth_max = 1
    while p ** (depth_max + 1) <= max_size:
        depth_max += 1
    depth = draw(st.integers(1, depth_max))
    r = draw(st.integers(-2, 3))
    return enumerate_cosets(p, r, r - depth)


def prime_power_rationals(p: int, max_exp: int = 12):
    return st.builds(lambda n, s: Fraction(n, p**s), st.integers(-10**6, 10**6), st.integers(0, max_exp))


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
