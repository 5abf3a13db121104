"""Shared fixtures: structures are expensive to build, so build them once."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from killinglab import (
    LeviCivita,
    build_deformed,
    build_hopf,
    build_irregular,
    build_quaternionic,
    build_round,
    sample_sphere,
)

SEED = 42


@pytest.fixture(scope="session")
def round1():
    return build_round(1)


@pytest.fixture(scope="session")
def round2():
    return build_round(2)


@pytest.fixture(scope="session")
def round3():
    return build_round(3)


@pytest.fixture(scope="session")
def lc_round1(round1):
    return LeviCivita(round1.metric)


@pytest.fixture(scope="session")
def lc_round2(round2):
    return LeviCivita(round2.metric)


@pytest.fixture(scope="session")
def lc_round3(round3):
    return LeviCivita(round3.metric)


@pytest.fixture(scope="session")
def pts1():
    return sample_sphere(1, 40, seed=SEED).points


@pytest.fixture(scope="session")
def pts2():
    return sample_sphere(2, 40, seed=SEED).points


@pytest.fixture(scope="session")
def pts3():
    return sample_sphere(3, 40, seed=SEED).points


@pytest.fixture(scope="session")
def quat0():
    return build_quaternionic(0)


@pytest.fixture(scope="session")
def quat1():
    return build_quaternionic(1)


@pytest.fixture(scope="session")
def deformed():
    return build_deformed(n=3, c=0.3)


@pytest.fixture(scope="session")
def irregular():
    return build_irregular()


@pytest.fixture(scope="session")
def hopf():
    return build_hopf()
