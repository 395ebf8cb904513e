import numpy as np
import pytest

from core.diffusion import desk_schedule
from core.phantom import generate_phantom
from schema.motion import PhantomSpec


@pytest.fixture
def phantom() -> np.ndarray:
    return generate_phantom(PhantomSpec(size=64, seed=3))


@pytest.fixture
def small_phantom() -> np.ndarray:
    return generate_phantom(PhantomSpec(size=32, seed=5))


@pytest.fixture
def schedule():
    return desk_schedule(100)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
