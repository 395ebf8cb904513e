"""
DDPM: линейное расписание шума, прямой процесс в замкнутой форме и шаг
обратного процесса за интерфейсом предсказателя шума.

Шаги нумеруются t = 1..T; массивы расписания хранятся с нулевого индекса.
"""
from dataclasses import dataclass, field
from typing import Literal, Optional, Protocol, Tuple

import numpy as np
from numpy.typing import NDArray

from core.errors import ConfigError, ShapeMismatchError, StepRangeError


REFERENCE_STEPS = 1000
DEFAULT_BETA_START = 1e-4
DEFAULT_BETA_END = 2e-2

Variance = Literal["beta", "posterior"]


@dataclass(frozen=True)
class NoiseSchedule:
    """
    Расписание β_t, ᾱ_t, σ_t для t = 1..T.

    Attributes:
        T (int): Число шагов
        beta_start (float): β_1
        beta_end (float): β_T
        beta (np.ndarray): β_1..β_T, линейно растущие
        alpha_bar (np.ndarray): ᾱ_t = ∏_{i≤t}(1 − β_i)
        sigma (np.ndarray): σ_t = √β_t; на шаге t = 1 шум не добавляется
        posterior_sigma (np.ndarray): σ̃_t = √(β_t·(1 − ᾱ_{t−1})/(1 − ᾱ_t)), σ̃_1 = 0
    """

    T: int
    beta_start: float
    beta_end: float
    beta: NDArray[np.float64] = field(repr=False)
    alpha_bar: NDArray[np.float64] = field(repr=False)
    sigma: NDArray[np.float64] = field(repr=False)
    posterior_sigma: NDArray[np.float64] = field(repr=False)

    def check_step(self, t: int) -> int:
        if not 1 <= t <= self.T:
            raise StepRangeError(f"Шаг t={t} вне 1..{self.T}")
        return t

    def beta_at(self, t: int) -> float:
        return float(self.beta[self.check_step(t) - 1])

    def alpha_bar_at(self, t: int) -> float:
        return float(self.alpha_bar[self.check_step(t) - 1])

    def sigma_at(self, t: int, variance: Variance = "beta") -> float:
        if self.check_step(t) == 1:
            return 0.0
        if variance == "posterior":
            return float(self.posterior_sigma[t - 1])
        if variance != "beta":
            raise ConfigError(f"Неизвестная дисперсия обратного шага: {variance}")
        return float(self.sigma[t - 1])


def make_schedule(T: int, beta_start: float = DEFAULT_BETA_START,
                  beta_end: float = DEFAULT_BETA_END) -> NoiseSchedule:
    """
    Линейное расписание шума.

    Args:
        T (int): Число шагов, T ≥ 1
        beta_start (float): β_1
        beta_end (float): β_T

    Returns:
        NoiseSchedule: Неизменяемое расписание

    Raises:
        ConfigError: 0 < beta_start ≤ beta_end < 1 не выполнено или T < 1
    """
    if T < 1:
        raise ConfigError(f"Число шагов должно быть положительным, получено {T}")
    if not 0.0 < beta_start <= beta_end < 1.0:
        raise ConfigError(f"Нужно 0 < beta_start ≤ beta_end < 1, получено [{beta_start}, {beta_end}]")

    beta = np.linspace(beta_start, beta_end, T, dtype=np.float64)
    alpha_bar = np.cumprod(1.0 - beta)
    for array in (beta, alpha_bar):
        array.setflags(write=False)
    sigma = np.sqrt(beta)
    alpha_bar_prev = np.concatenate([[1.0], alpha_bar[:-1]])
    posterior_sigma = np.sqrt(beta * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar))
    for array in (sigma, posterior_sigma):
        array.setflags(write=False)
    return NoiseSchedule(T=T, beta_start=float(beta_start), beta_end=float(beta_end),
                         beta=beta, alpha_bar=alpha_bar, sigma=sigma,
                         posterior_sigma=posterior_sigma)


def desk_schedule(T: int) -> NoiseSchedule:
    """
    Расписание с диапазоном β, пересчитанным с 1000 шагов на T.

    При T ≤ 20 β_T достигает 1, и make_schedule отклоняет такое расписание.
    """
    scale = REFERENCE_STEPS / T
    return make_schedule(T, DEFAULT_BETA_START * scale, DEFAULT_BETA_END * scale)


class Denoiser(Protocol):
    """Предсказатель шума ε_θ: по (x_t, t) возвращает ε̂ той же формы."""

    def predict(self, x_t: np.ndarray, t: int) -> np.ndarray:
        ...


class OracleDenoiser:
    """
    Тестовый предсказатель, знающий чистое изображение.

    Возвращает ε̂ = (x_t − √ᾱ_t·target)/√(1 − ᾱ_t), то есть ровно тот шум,
    из которого x_t получен прямым процессом.
    """

    def __init__(self, target: np.ndarray, schedule: NoiseSchedule) -> None:
        self.target = np.asarray(target, dtype=np.float64)
        self.schedule = schedule

    def predict(self, x_t: np.ndarray, t: int) -> np.ndarray:
        if np.shape(x_t) != self.target.shape:
            raise ShapeMismatchError(
                f"Оракул настроен на {self.target.shape}, получено {np.shape(x_t)}"
            )
        alpha_bar = self.schedule.alpha_bar_at(t)
        return (x_t - np.sqrt(alpha_bar) * self.target) / np.sqrt(1.0 - alpha_bar)


def forward_sample(schedule: NoiseSchedule, x0: np.ndarray, t: int,
                   noise: np.ndarray) -> np.ndarray:
    """x_t = √ᾱ_t·x0 + √(1 − ᾱ_t)·ε без ограничения диапазона."""
    if np.shape(noise) != np.shape(x0):
        raise ShapeMismatchError(f"Шум {np.shape(noise)} не совпадает с x0 {np.shape(x0)}")
    alpha_bar = schedule.alpha_bar_at(t)
    return np.sqrt(alpha_bar) * x0 + np.sqrt(1.0 - alpha_bar) * noise


def reverse_step(schedule: NoiseSchedule, denoiser: Denoiser, x_t: np.ndarray,
                 t: int, noise: np.ndarray, variance: Variance = "beta",
                 clip_range: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """
    Один шаг обратного процесса в ε-параметризации.

    μ_θ = (x_t − β_t/√(1 − ᾱ_t)·ε̂)/√(1 − β_t), x_{t−1} = μ_θ + σ_t·noise,
    на t = 1 шумовое слагаемое опускается.

    С clip_range оценка x̂_0 = (x_t − √(1 − ᾱ_t)·ε̂)/√ᾱ_t ограничивается
    диапазоном данных, и ε̂ пересчитывается из ограниченной оценки.

    Args:
        schedule (NoiseSchedule): Расписание шума
        denoiser (Denoiser): Предсказатель шума
        x_t (np.ndarray): Текущий латент
        t (int): Шаг, 1..T
        noise (np.ndarray): Стандартный нормальный шум формы x_t
        variance (str): beta: σ_t² = β_t; posterior: σ_t² = β̃_t
        clip_range (tuple | None): Диапазон данных для x̂_0

    Returns:
        np.ndarray: x_{t−1}

    Raises:
        ShapeMismatchError: форма ε̂ или шума не совпадает с x_t
    """
    beta = schedule.beta_at(t)
    alpha_bar = schedule.alpha_bar_at(t)
    eps = np.asarray(denoiser.predict(x_t, t))
    if eps.shape != np.shape(x_t):
        raise ShapeMismatchError(f"Предсказатель вернул {eps.shape} вместо {np.shape(x_t)}")
    if np.shape(noise) != np.shape(x_t):
        raise ShapeMismatchError(f"Шум {np.shape(noise)} не совпадает с x_t {np.shape(x_t)}")
    if clip_range is not None:
        x0 = np.clip((x_t - np.sqrt(1.0 - alpha_bar) * eps) / np.sqrt(alpha_bar), *clip_range)
        eps = (x_t - np.sqrt(alpha_bar) * x0) / np.sqrt(1.0 - alpha_bar)

    mean = (x_t - beta / np.sqrt(1.0 - alpha_bar) * eps) / np.sqrt(1.0 - beta)
    if t == 1:
        return mean
    return mean + schedule.sigma_at(t, variance) * noise
