import numpy as np
import pytest

from thermoquad.config import load_default_config
from thermoquad.harness import build_context


@pytest.fixture(scope="session")
def config():
    return load_default_config()


@pytest.fixture(scope="session")
def ctx(config):
    return build_context(config)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
