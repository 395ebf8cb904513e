import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from core.diffusion import NoiseSchedule
from core.errors import DivergenceError, EmptyCorpusError, ShapeMismatchError
from core.network import NoiseNet, ToyDenoiser
from schema.config import TrainConfig


@dataclass
class TrainOutcome:
    """
    Результат обучения.

    Attributes:
        denoiser (ToyDenoiser): Обученный предсказатель шума
        initial_loss (float): Потеря на отложенной выборке до обучения
        final_loss (float): Потеря на отложенной выборке после обучения
        losses (list): Обучающая потеря по шагам
    """

    denoiser: ToyDenoiser
    initial_loss: float
    final_loss: float
    losses: List[float] = field(default_factory=list)


def _split(corpus: torch.Tensor, fraction: float):
    if len(corpus) == 1:
        return corpus, corpus
    held = min(len(corpus) - 1, max(1, round(len(corpus) * fraction)))
    return corpus[:-held], corpus[-held:]


def _noisy(x0: torch.Tensor, t: torch.Tensor, eps: torch.Tensor,
           alpha_bar: torch.Tensor) -> torch.Tensor:
    ab = alpha_bar[t - 1][:, None, None, None]
    return torch.sqrt(ab) * x0 + torch.sqrt(1.0 - ab) * eps


def train_toy_denoiser(corpus: Sequence[np.ndarray], schedule: NoiseSchedule,
                       config: TrainConfig) -> TrainOutcome:
    """
    Обучает NoiseNet на потере E‖ε − ε_θ(x_t, t)‖².

    Отложенная выборка берётся из хвоста корпуса; её шум и шаги
    фиксированы отдельным генератором, так что начальная и конечная
    потери сравнимы.

    Args:
        corpus (Sequence[np.ndarray]): Чистые изображения одного размера
        schedule (NoiseSchedule): Расписание шума
        config (TrainConfig): Гиперпараметры обучения

    Returns:
        TrainOutcome: Сеть и потери

    Raises:
        EmptyCorpusError: пустой корпус
        ShapeMismatchError: изображения разного размера
        DivergenceError: потеря стала нечисловой
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("Корпус для обучения пуст")
    shapes = {np.shape(image) for image in corpus}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"Изображения корпуса разного размера: {sorted(shapes)}")

    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    data = torch.from_numpy(np.stack(corpus).astype(np.float32))[:, None]
    train, held = _split(data, config.holdout_fraction)
    alpha_bar = torch.from_numpy(schedule.alpha_bar.astype(np.float32))

    held_generator = torch.Generator().manual_seed(config.seed + 1)
    held_x0 = held.repeat(config.holdout_draws, 1, 1, 1)
    held_t = torch.randint(1, schedule.T + 1, (len(held_x0),), generator=held_generator)
    held_eps = torch.randn(held_x0.shape, generator=held_generator)
    held_xt = _noisy(held_x0, held_t, held_eps, alpha_bar)

    network = NoiseNet(config.base_channels, config.time_dim)

    def held_loss() -> float:
        with torch.no_grad():
            return F.mse_loss(network(held_xt, held_t), held_eps).item()

    initial = held_loss()
    optimizer = torch.optim.Adam(network.parameters(), lr=config.learning_rate)
    losses = []
    for step in range(config.steps):
        index = torch.randint(0, len(train), (config.batch_size,), generator=generator)
        x0 = train[index]
        t = torch.randint(1, schedule.T + 1, (config.batch_size,), generator=generator)
        eps = torch.randn(x0.shape, generator=generator)

        loss = F.mse_loss(network(_noisy(x0, t, eps, alpha_bar), t), eps)
        if not torch.isfinite(loss):
            raise DivergenceError(f"Потеря стала нечисловой на шаге {step}")
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(loss.item())

    final = held_loss()
    if not math.isfinite(final):
        raise DivergenceError("Потеря на отложенной выборке нечисловая")
    return TrainOutcome(ToyDenoiser(network, schedule), initial, final, losses)
