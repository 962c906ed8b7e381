import random

import numpy as np
import pytest

from sysflow import PEConfig
from sysflow.config import ENV_CLOCK_HZ, ENV_POWER_PER_PE


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Tests see the built-in constants unless they set the overrides themselves."""
    monkeypatch.delenv(ENV_POWER_PER_PE, raising=False)
    monkeypatch.delenv(ENV_CLOCK_HZ, raising=False)


@pytest.fixture
def cfg():
    return PEConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def py_rng():
    return random.Random(20241019)


@pytest.fixture
def int_matrix(rng):
    """Integer-valued float64 matrices drawn from the shared generator."""

    def make(rows, cols, low=-8, high=8):
        return rng.integers(low, high + 1, size=(rows, cols)).astype(np.float64)

    return make
