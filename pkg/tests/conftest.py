import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from malcev import parse_presentation  # noqa: E402

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def load(name: str):
    return parse_presentation((DATA / name).read_text())


@pytest.fixture(scope="session")
def heis():
    return load("heis.ngp")


@pytest.fixture(scope="session")
def ut4():
    return load("ut4.ngp")


@pytest.fixture(scope="session")
def heis125():
    return load("heis125.ngp")


@pytest.fixture(scope="session")
def z2():
    return parse_presentation("gens 2\nweight 1 1\nweight 2 1\n")


@pytest.fixture(scope="session")
def z5():
    return parse_presentation("gens 1\nweight 1 1\npow 1 5 :\n")


@pytest.fixture
def data_dir():
    return DATA
