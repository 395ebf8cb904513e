import numpy as np
import numpy.testing as npt
import pytest
import torch

from base.checkpoint import MAGIC, load_checkpoint, save_checkpoint
from core.diffusion import desk_schedule, make_schedule
from core.errors import CheckpointError, EmptyCorpusError, ShapeMismatchError, StepRangeError
from core.network import NoiseNet, SinusoidalEmbedding, ToyDenoiser
from core.phantom import generate_phantom
from core.train import train_toy_denoiser
from schema.config import TrainConfig
from schema.motion import PhantomSpec


@pytest.fixture
def toy() -> ToyDenoiser:
    torch.manual_seed(0)
    network = NoiseNet(base_channels=8, time_dim=16)
    for parameter in network.head.parameters():
        torch.nn.init.normal_(parameter, std=0.1)
    return ToyDenoiser(network, make_schedule(40, 1e-3, 0.05))


def test_embedding_shape():
    emb = SinusoidalEmbedding(16)(torch.tensor([1.0, 50.0]))
    assert emb.shape == (2, 16)
    assert torch.all(emb.abs() <= 1.0)


@pytest.mark.parametrize("size", [(32, 32), (30, 22)])
def test_network_keeps_spatial_size(size):
    network = NoiseNet(base_channels=8, time_dim=16)
    out = network(torch.zeros(2, 1, *size), torch.tensor([1, 7]))
    assert out.shape == (2, 1, *size)


def test_untrained_head_predicts_zero(small_phantom):
    denoiser = ToyDenoiser(NoiseNet(base_channels=8, time_dim=16), desk_schedule(50))
    eps = denoiser.predict(small_phantom, 10)
    assert eps.dtype == np.float64
    assert eps.shape == small_phantom.shape
    assert np.all(eps == 0.0)


def test_predict_checks_input(toy):
    with pytest.raises(ShapeMismatchError):
        toy.predict(np.zeros((1, 8, 8)), 3)
    with pytest.raises(StepRangeError):
        toy.predict(np.zeros((8, 8)), 41)


def test_checkpoint_round_trip(tmp_path, toy, small_phantom):
    path = save_checkpoint(tmp_path / "toy.ckpt", toy)
    assert path.read_bytes().startswith(MAGIC)
    loaded = load_checkpoint(path)

    original, restored = toy.network.state_dict(), loaded.network.state_dict()
    assert list(original) == list(restored)
    for name in original:
        assert torch.equal(original[name], restored[name])
    assert loaded.schedule.T == 40
    npt.assert_array_equal(loaded.schedule.alpha_bar, toy.schedule.alpha_bar)
    npt.assert_array_equal(loaded.predict(small_phantom, 12), toy.predict(small_phantom, 12))


def test_corrupted_checkpoints(tmp_path, toy):
    payload = save_checkpoint(tmp_path / "toy.ckpt", toy).read_bytes()

    cases = {
        "magic.ckpt": b"NOTACKPT" + payload[8:],
        "version.ckpt": payload[:8] + (7).to_bytes(4, "little") + payload[12:],
        "short.ckpt": payload[:-4],
        "header.ckpt": payload[:20],
    }
    for name, data in cases.items():
        (tmp_path / name).write_bytes(data)
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / name)
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.ckpt")


def test_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        train_toy_denoiser([], desk_schedule(50), TrainConfig(steps=1))


def test_mixed_sizes():
    corpus = [np.zeros((16, 16)), np.zeros((32, 32))]
    with pytest.raises(ShapeMismatchError):
        train_toy_denoiser(corpus, desk_schedule(50), TrainConfig(steps=1))


def test_single_image_corpus_trains():
    outcome = train_toy_denoiser([generate_phantom(PhantomSpec(size=16))], desk_schedule(50),
                                 TrainConfig(steps=3, base_channels=4, time_dim=8))
    assert len(outcome.losses) == 3
    assert np.isfinite(outcome.final_loss)
    assert outcome.initial_loss == pytest.approx(1.0, abs=0.5)


@pytest.mark.slow
def test_training_reduces_held_out_loss():
    corpus = [generate_phantom(PhantomSpec(size=32, seed=seed)) for seed in range(32)]
    config = TrainConfig(steps=400, batch_size=8, learning_rate=2e-3,
                         base_channels=8, time_dim=32, seed=0)
    outcome = train_toy_denoiser(corpus, desk_schedule(50), config)
    assert outcome.final_loss < 0.5 * outcome.initial_loss


@pytest.mark.slow
def test_identical_images_still_lower_held_out_loss():
    corpus = [generate_phantom(PhantomSpec(size=32, seed=4))] * 8
    config = TrainConfig(steps=200, batch_size=8, learning_rate=2e-3,
                         base_channels=8, time_dim=32, seed=1)
    outcome = train_toy_denoiser(corpus, desk_schedule(50), config)
    assert outcome.final_loss < outcome.initial_loss
