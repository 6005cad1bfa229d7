import numpy as np
import pytest

from ensembles import RngSeed, rng_from_seed


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_from_seed(RngSeed(seed=1234))


@pytest.fixture
def seed() -> RngSeed:
    return RngSeed(seed=7)
