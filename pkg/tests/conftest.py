"""
Shared fixtures: a clean default configuration and a seeded generator
"""
import numpy as np
import pytest

from ovlf.config import Config, set_config


def pytest_addoption(parser):
    parser.addoption("--seed", action="store", type=int, default=0,
                     help="Seed for randomized (non-hypothesis) tests")


@pytest.fixture(autouse=True, scope="session")
def default_config():
    """Defaults only, so OVLF_* variables in the environment cannot leak into tests"""
    set_config(Config())
    yield
    set_config(None)


@pytest.fixture
def config():
    """A fresh default config, restored after the test; mutate freely"""
    cfg = Config()
    set_config(cfg)
    yield cfg
    set_config(Config())


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)
