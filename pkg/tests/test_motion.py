import math

import numpy as np
import numpy.testing as npt
import pytest
from pydantic import ValidationError

from core.errors import ConfigError
from core.kspace import axis_frequencies, dft2, idft2, magnitude
from core.metrics import PSNR_CAP, psnr
from core.motion import (draw_respiratory_params, draw_rigid_params, perturb_phase,
                         perturbed_rows, simulate, simulate_respiratory, simulate_rigid)
from core.phantom import generate_phantom
from schema.motion import PhantomSpec, RespiratoryParams, RigidMotionParams


def test_linear_phase_is_circular_shift(phantom):
    shifted = perturb_phase(dft2(phantom), lambda k_y: 3.0 * k_y, k0=1e-9)
    npt.assert_allclose(magnitude(idft2(shifted)), np.roll(phantom, 3, axis=0), atol=1e-10)


def test_shift_along_readout_axis(phantom):
    shifted = perturb_phase(dft2(phantom), lambda k_y: 2.0 * k_y, k0=1e-9, axis=1)
    npt.assert_allclose(magnitude(idft2(shifted)), np.roll(phantom, 2, axis=1), atol=1e-10)


def test_phase_only_perturbation_keeps_magnitude(phantom, rng):
    grid = dft2(phantom)
    phases = rng.uniform(-10, 10, size=phantom.shape[0])
    perturbed = perturb_phase(grid, lambda k_y: phases, k0=math.pi / 10)
    npt.assert_allclose(np.abs(perturbed), np.abs(grid), rtol=1e-9)


def test_low_band_is_untouched(phantom):
    grid = dft2(phantom)
    perturbed = perturb_phase(grid, lambda k_y: 7.0 * np.sin(k_y), k0=math.pi / 10)
    low = ~perturbed_rows(phantom.shape[0], math.pi / 10)
    assert np.array_equal(perturbed[low], grid[low])
    assert not np.allclose(perturbed[~low], grid[~low])


def test_perturbed_rows_boundary_is_low():
    rows = perturbed_rows(256, math.pi / 10)
    assert (~rows).sum() == 25
    assert not rows[128]


def test_zero_motion_reproduces_input(phantom):
    rigid = simulate_rigid(phantom, RigidMotionParams(delta_k=0.0))
    npt.assert_allclose(rigid, phantom, atol=1e-6)
    respiratory = simulate_respiratory(phantom, RespiratoryParams(delta_k=0.0, period_m=1.0))
    npt.assert_allclose(respiratory, phantom, atol=1e-6)


def test_larger_shift_degrades_more(phantom):
    small = simulate_rigid(phantom, RigidMotionParams(delta_k=0.035))
    large = simulate_rigid(phantom, RigidMotionParams(delta_k=0.56))
    assert psnr(large, phantom) < psnr(small, phantom) < PSNR_CAP


def test_corpus_degradation_is_monotone_in_delta_k():
    corpus = [generate_phantom(PhantomSpec(size=64, seed=seed)) for seed in range(32)]
    means = [
        np.mean([psnr(simulate_rigid(clean, RigidMotionParams(delta_k=delta_k)), clean)
                 for clean in corpus])
        for delta_k in (0.5, 1.5, 3.0)
    ]
    assert means[0] > means[1] > means[2]


def test_rigid_output_is_clamped_image(phantom):
    corrupted = simulate_rigid(phantom, RigidMotionParams(delta_k=2.7, rotation_deg=1.5,
                                                          pixel_spacing_cm=0.28))
    assert corrupted.shape == phantom.shape
    assert corrupted.min() >= 0.0 and corrupted.max() <= 1.0
    assert psnr(corrupted, phantom) < PSNR_CAP


def test_respiratory_phase_function(phantom):
    params = RespiratoryParams(delta_k=1.15, period_m=2.0, phase_n=0.3, pixel_spacing_cm=0.28)
    grid = dft2(phantom)
    k_y = axis_frequencies(phantom.shape[0])
    phi = k_y * params.amplitude_px * np.sin(params.period_m * k_y + params.phase_n)
    expected = np.where(perturbed_rows(len(k_y), params.k0)[:, None],
                        grid * np.exp(-1j * phi)[:, None], grid)
    npt.assert_allclose(simulate_respiratory(phantom, params),
                        np.clip(np.abs(idft2(expected)), 0, 1), atol=1e-12)


def test_simulate_dispatches_on_params(phantom):
    params = RigidMotionParams(delta_k=1.0)
    npt.assert_array_equal(simulate(phantom, params), simulate_rigid(phantom, params))
    with pytest.raises(ConfigError):
        simulate(phantom, object())


def test_non_finite_phase_is_rejected(phantom):
    with pytest.raises(ConfigError):
        perturb_phase(dft2(phantom), lambda k_y: k_y * np.inf, k0=0.5)


@pytest.mark.parametrize("k0", [0.0, math.pi])
def test_k0_out_of_range(phantom, k0):
    with pytest.raises(ConfigError):
        perturb_phase(dft2(phantom), lambda k_y: k_y, k0=k0)


def test_params_validation():
    with pytest.raises(ValidationError):
        RigidMotionParams(delta_k=-1.0)
    with pytest.raises(ValidationError):
        RespiratoryParams(delta_k=1.0, period_m=0.0)
    assert RigidMotionParams(delta_k=0.7, pixel_spacing_cm=0.07).shift_px == pytest.approx(10.0)
    assert RigidMotionParams(delta_k=2.5).shift_px == 2.5


def test_drawn_params_are_seeded_and_in_range():
    first = draw_rigid_params(7)
    assert first == draw_rigid_params(7)
    assert first != draw_rigid_params(8)
    assert 2.5 <= first.delta_k <= 3.0
    assert -2.0 <= first.rotation_deg <= 2.0
    assert first.seed == 7

    breathing = draw_respiratory_params(7)
    assert 1.1 <= breathing.delta_k <= 1.2
    assert 0.1 <= breathing.period_m <= 5.0
    assert 0.0 <= breathing.phase_n <= math.pi / 4
