import numpy as np
import pytest
from pydantic import ValidationError

from core.phantom import generate_phantom
from schema.motion import PhantomSpec


def test_phantom_shape_and_range():
    image = generate_phantom(PhantomSpec(size=48, seed=1))
    assert image.shape == (48, 48)
    assert image.min() >= 0.0 and image.max() <= 1.0
    assert image[24, 24] > 0.0
    assert image[0, 0] == 0.0


def test_phantom_is_seeded():
    spec = PhantomSpec(size=32, seed=9)
    assert np.array_equal(generate_phantom(spec), generate_phantom(spec))
    assert not np.array_equal(generate_phantom(spec), generate_phantom(PhantomSpec(size=32, seed=10)))


def test_intensity_range_is_respected():
    image = generate_phantom(PhantomSpec(size=32, intensity_range=(0.5, 0.5), seed=2))
    assert image.max() <= 0.5 + 1e-12


def test_corpus_mean_lies_in_default_range():
    spec = PhantomSpec()
    corpus = [generate_phantom(PhantomSpec(size=64, seed=seed)) for seed in range(64)]
    lo, hi = spec.intensity_range
    assert lo <= np.mean(corpus) <= hi


def test_single_centered_ellipse_is_point_symmetric():
    image = generate_phantom(PhantomSpec(size=64, ellipse_count=1, seed=6))
    np.testing.assert_allclose(image, np.rot90(image, 2), atol=1e-12)
    assert image.max() > 0.0


@pytest.mark.parametrize("fields", [
    {"size": 8},
    {"ellipse_count": 0},
    {"intensity_range": (0.8, 0.2)},
    {"intensity_range": (0.0, 1.5)},
])
def test_invalid_spec(fields):
    with pytest.raises(ValidationError):
        PhantomSpec(**fields)
