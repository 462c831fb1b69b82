"""Shared fixtures: the stationary profiles are expensive, solve them once."""

from __future__ import annotations

import pytest

from anwaves.stationary import solve_stationary


@pytest.fixture(scope="session")
def q1():
    return solve_stationary(1)


@pytest.fixture(scope="session")
def q2():
    return solve_stationary(2)


@pytest.fixture(scope="session")
def q3():
    return solve_stationary(3)
