import math

import numpy as np
import numpy.testing as npt
import pytest

from core.diffusion import OracleDenoiser, desk_schedule
from core.errors import ConfigError, NonFiniteLatentError
from core.kspace import dft2, make_filter_pair
from core.metrics import psnr, ssim
from core.motion import draw_rigid_params, simulate_rigid
from core.phantom import generate_phantom
from core.purify import (MaskState, checkerboard, gamma, mask_weight, pixel_reorganize,
                         purify, reorganize_kspace)
from core.train import train_toy_denoiser
from schema.config import PurifyConfig, TrainConfig
from schema.motion import PhantomSpec, RigidMotionParams


def test_checkerboard_parities_are_complements():
    even = checkerboard(20, 12, 3, 0)
    odd = checkerboard(20, 12, 3, 1)
    assert set(np.unique(even)) == {0.0, 1.0}
    assert np.array_equal(even + odd, np.ones((20, 12)))
    assert even[0, 0] == 1.0 and even[0, 3] == 0.0 and even[3, 3] == 1.0


def test_alternating_masks_cover_every_pixel_evenly(schedule):
    state = MaskState(64, 64, 16)
    coverage = np.zeros((64, 64))
    previous = None
    for t in range(schedule.T, 0, -1):
        mask = state.mask()
        if previous is not None:
            assert np.array_equal(mask, 1.0 - previous)
        weighted = mask_weight(schedule, t) * mask
        assert weighted.min() >= 0.0 and weighted.max() <= 1.0
        coverage += mask
        previous = mask
        state = state.flip()
    assert np.all(coverage == 50)


def test_mask_weight_and_gamma(schedule):
    assert mask_weight(schedule, 40) == pytest.approx(1 - math.sqrt(schedule.alpha_bar_at(40)))
    assert 0.0 < mask_weight(schedule, 1) < mask_weight(schedule, 100) < 1.0
    assert gamma(1000, 1000, 0.7) == pytest.approx(1 - 0.7 / math.e)
    assert gamma(0, 1000, 0.7) == pytest.approx(0.3)
    assert gamma(500, 1000, 0.0) == 1.0


def test_low_band_is_anchored(phantom, rng):
    filters = make_filter_pair(math.pi / 10)
    ori = dft2(phantom)
    mask = rng.uniform(size=phantom.shape)
    grid = reorganize_kspace(ori, rng.standard_normal(phantom.shape), mask, filters)
    low = filters[0].mask(ori.shape)
    assert np.array_equal(grid[low], ori[low])


def test_full_mask_keeps_corrupted_spectrum(phantom, rng):
    filters = make_filter_pair(math.pi / 10)
    ori = dft2(phantom)
    grid = reorganize_kspace(ori, rng.standard_normal(phantom.shape), np.ones(phantom.shape), filters)
    npt.assert_allclose(grid, ori, atol=1e-15)


def test_pixel_reorganize_blends():
    forward, generated = np.full((4, 4), 2.0), np.full((4, 4), -1.0)
    mask = np.full((4, 4), 0.25)
    npt.assert_allclose(pixel_reorganize(forward, generated, mask), 0.25 * 2.0 - 0.75)


def _config(**fields) -> PurifyConfig:
    return PurifyConfig(**{"T": 100, "grid_size": 8, **fields})


def test_full_guidance_short_circuit(phantom, schedule):
    config = _config(guidance="full", balance="frequency", omega_frequency=False, omega_pixel=False)
    output, _ = purify(phantom, config, schedule, OracleDenoiser(phantom, schedule))
    npt.assert_allclose(output, phantom, atol=1e-9)


def test_oracle_purification_improves_corrupted_image(phantom, schedule):
    corrupted = simulate_rigid(phantom, RigidMotionParams(delta_k=2.8, pixel_spacing_cm=0.28))
    output, steps = purify(corrupted, _config(), schedule, OracleDenoiser(phantom, schedule),
                           reference=phantom, trace=True)
    assert output.shape == phantom.shape
    assert output.min() >= 0.0 and output.max() <= 1.0
    assert psnr(output, phantom) > psnr(corrupted, phantom)

    assert [r.t for r in steps.records] == list(range(100, 0, -1))
    assert steps.records[-1].psnr == pytest.approx(psnr(output, phantom))
    lines = steps.to_tsv().splitlines()
    assert lines[0] == "t\tomega\tgamma\tpsnr"
    assert len(lines) == 101


def test_purify_is_reproducible(small_phantom):
    schedule = desk_schedule(30)
    config = _config(T=30, seed=11)
    oracle = OracleDenoiser(small_phantom, schedule)
    first, _ = purify(small_phantom, config, schedule, oracle)
    second, _ = purify(small_phantom, config, schedule, oracle)
    assert np.array_equal(first, second)
    other, _ = purify(small_phantom, config, schedule, oracle, rng=np.random.default_rng(12))
    assert not np.array_equal(first, other)


@pytest.mark.parametrize("fields", [
    {"balance": "frequency"}, {"balance": "pixel"}, {"guidance": "none"},
    {"omega_frequency": False}, {"omega_pixel": False},
])
def test_ablation_arms_run(small_phantom, fields):
    schedule = desk_schedule(30)
    output, _ = purify(small_phantom, _config(T=30, **fields), schedule,
                       OracleDenoiser(small_phantom, schedule))
    assert output.shape == small_phantom.shape
    assert np.all(np.isfinite(output))


def test_trace_without_reference_has_no_psnr(small_phantom):
    schedule = desk_schedule(30)
    _, steps = purify(small_phantom, _config(T=30), schedule,
                      OracleDenoiser(small_phantom, schedule), trace=True)
    assert all(r.psnr is None for r in steps.records)
    assert steps.records[0].gamma == pytest.approx(gamma(30, 30, 0.7))


def test_schedule_length_must_match(small_phantom, schedule):
    with pytest.raises(ConfigError):
        purify(small_phantom, _config(T=50), schedule, OracleDenoiser(small_phantom, schedule))


def test_grid_larger_than_image(small_phantom, schedule):
    with pytest.raises(ConfigError):
        purify(small_phantom, _config(grid_size=64), schedule,
               OracleDenoiser(small_phantom, schedule))


def test_non_finite_latent_names_step(small_phantom, schedule):
    class Exploding:
        def predict(self, x_t, t):
            return np.full(x_t.shape, np.nan)

    with pytest.raises(NonFiniteLatentError) as error:
        purify(small_phantom, _config(), schedule, Exploding())
    assert error.value.step == 100


@pytest.fixture(scope="module")
def trained():
    schedule = desk_schedule(100)
    corpus = [generate_phantom(PhantomSpec(size=64, seed=1000 + seed)) for seed in range(64)]
    return schedule, train_toy_denoiser(corpus, schedule, TrainConfig()).denoiser


def _purified(trained, images, **fields):
    schedule, denoiser = trained
    config = PurifyConfig(T=schedule.T, reverse_variance="posterior", **fields)
    return [purify(image, config, schedule, denoiser, rng=np.random.default_rng(index))[0]
            for index, image in enumerate(images)]


def _mean(metric, images, references):
    return float(np.mean([metric(image, ref) for image, ref in zip(images, references)]))


@pytest.fixture(scope="module")
def desk_corpus():
    clean = [generate_phantom(PhantomSpec(size=64, seed=seed)) for seed in range(12)]
    corrupted = [simulate_rigid(image, draw_rigid_params(seed))
                 for seed, image in enumerate(clean)]
    return clean, corrupted


@pytest.mark.slow
def test_trained_purification_improves_psnr_and_ssim(trained, desk_corpus):
    clean, corrupted = desk_corpus
    purified = _purified(trained, corrupted)
    assert _mean(psnr, purified, clean) > _mean(psnr, corrupted, clean)
    assert _mean(ssim, purified, clean) > _mean(ssim, corrupted, clean)


@pytest.mark.slow
def test_frequency_branch_beats_pixel_branch(trained, desk_corpus):
    clean, corrupted = desk_corpus
    frequency = _purified(trained, corrupted, balance="frequency")
    pixel = _purified(trained, corrupted, balance="pixel")
    assert _mean(psnr, frequency, clean) > _mean(psnr, pixel, clean)


@pytest.mark.slow
def test_clean_input_is_roughly_preserved(trained, desk_corpus):
    clean, _ = desk_corpus
    assert _mean(psnr, _purified(trained, clean[:8]), clean[:8]) >= 20.0
