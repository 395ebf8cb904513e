import math

import numpy as np
import numpy.testing as npt
import pytest

from core.errors import ConfigError, ShapeMismatchError
from core.kspace import (apply_filter, axis_frequencies, check_image, dft2, idft2,
                         magnitude, make_filter, make_filter_pair)


def test_filter_pair_reconstructs_grid_exactly(rng):
    for _ in range(100):
        height, width = rng.integers(2, 40, size=2)
        grid = rng.standard_normal((height, width)) + 1j * rng.standard_normal((height, width))
        cutoff = rng.uniform(1e-3, math.pi)
        axis = int(rng.integers(0, 2))
        low, high = make_filter_pair(cutoff, axis)
        assert np.array_equal(apply_filter(low, grid) + apply_filter(high, grid), grid)


def test_low_pass_row_count_at_256():
    low, _ = make_filter_pair(math.pi / 10)
    band = low.band(256)
    assert band.sum() == 25
    rows = np.flatnonzero(band)
    assert rows.min() == 128 - 12 and rows.max() == 128 + 12


def test_filter_is_constant_along_readout_axis():
    low = make_filter(math.pi / 4, axis=1)
    mask = low.mask((6, 16))
    assert np.array_equal(mask, np.broadcast_to(mask[0], (6, 16)))
    assert mask[0, 8]


def test_filters_are_idempotent(rng):
    grid = rng.standard_normal((24, 20)) + 1j * rng.standard_normal((24, 20))
    for filt in make_filter_pair(math.pi / 10):
        once = apply_filter(filt, grid)
        assert np.array_equal(apply_filter(filt, once), once)


@pytest.mark.parametrize("axis", [0, 1])
def test_high_pass_selects_whole_phase_lines(axis):
    _, high = make_filter_pair(math.pi / 10, axis)
    shape = (32, 20) if axis == 0 else (20, 32)
    mask = high.mask(shape)
    lines = mask if axis == 0 else mask.T
    assert np.all(lines.all(axis=1) | ~lines.any(axis=1))
    expected = np.abs(axis_frequencies(32)) > math.pi / 10
    assert np.array_equal(lines[:, 0], expected)


def test_cutoff_pi_passes_everything():
    low, high = make_filter_pair(math.pi)
    assert low.band(32).all()
    assert not high.band(32).any()


@pytest.mark.parametrize("cutoff", [0.0, -1.0, math.pi + 0.1])
def test_make_filter_rejects_cutoff(cutoff):
    with pytest.raises(ConfigError):
        make_filter(cutoff)


def test_make_filter_rejects_axis():
    with pytest.raises(ConfigError):
        make_filter(1.0, axis=2)


def test_apply_filter_needs_two_rows():
    low = make_filter(1.0)
    with pytest.raises(ShapeMismatchError):
        apply_filter(low, np.ones((1, 8), dtype=complex))


def test_dft_round_trip(phantom):
    npt.assert_allclose(idft2(dft2(phantom)).real, phantom, atol=1e-12)
    npt.assert_allclose(magnitude(idft2(dft2(phantom))), phantom, atol=1e-12)


def test_parseval_without_size_factor(phantom):
    energy = np.sum(np.abs(dft2(phantom)) ** 2)
    assert energy == pytest.approx(np.sum(phantom ** 2), rel=1e-10)


def test_dc_at_grid_center():
    image = np.full((8, 6), 0.5)
    grid = dft2(image)
    assert grid[4, 3] == pytest.approx(0.5 * math.sqrt(48))
    grid[4, 3] = 0
    npt.assert_allclose(np.abs(grid), 0.0, atol=1e-12)


def test_impulse_spectrum_is_flat():
    image = np.zeros((16, 16))
    image[8, 8] = 1.0
    npt.assert_allclose(np.abs(dft2(image)), 1.0 / 16.0, atol=1e-12)


def test_axis_frequencies_range():
    freqs = axis_frequencies(8)
    assert freqs[0] == pytest.approx(-math.pi)
    assert freqs[4] == 0.0
    assert freqs.max() < math.pi


def test_check_image_rejects_bad_input():
    with pytest.raises(ShapeMismatchError):
        check_image(np.ones(5))
    with pytest.raises(ShapeMismatchError):
        check_image(np.array([[0.0, np.nan]]))
