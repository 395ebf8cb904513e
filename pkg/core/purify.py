"""
Цикл очистки PFAD: чередующиеся комплементарные шахматные маски,
перестройка информации в частотном и пиксельном доменах и баланс γ_t
между ними.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from core.diffusion import Denoiser, NoiseSchedule, forward_sample, reverse_step
from core.errors import ConfigError, NonFiniteLatentError
from core.kspace import (FrequencyFilter, Image, KSpaceGrid, apply_filter, check_image,
                         check_same_shape, clamp, dft2, idft2, magnitude, make_filter_pair)
from core.metrics import psnr
from schema.config import PurifyConfig


DATA_RANGE = (0.0, 1.0)


def checkerboard(height: int, width: int, grid_size: int, parity: int) -> np.ndarray:
    """Пиксель (r, c) включён, если ⌊r/g⌋ + ⌊c/g⌋ + parity чётно."""
    if grid_size < 1:
        raise ConfigError(f"grid_size должно быть не меньше 1, получено {grid_size}")
    rows = np.arange(height)[:, None] // grid_size
    cols = np.arange(width)[None, :] // grid_size
    return ((rows + cols + parity) % 2 == 0).astype(np.float64)


@dataclass(frozen=True)
class MaskState:
    height: int
    width: int
    grid_size: int
    parity: int = 0

    def mask(self) -> np.ndarray:
        return checkerboard(self.height, self.width, self.grid_size, self.parity)

    def flip(self) -> "MaskState":
        return MaskState(self.height, self.width, self.grid_size, 1 - self.parity)


def mask_weight(schedule: NoiseSchedule, t: int) -> float:
    """ω_t = 1 − √ᾱ_t."""
    return 1.0 - math.sqrt(schedule.alpha_bar_at(t))


def gamma(t: int, T: int, a: float) -> float:
    """γ_t = −a·e^(−t/T) + 1."""
    return -a * math.exp(-t / T) + 1.0


def reorganize_kspace(ori_kspace: KSpaceGrid, x_gen: np.ndarray, mask: np.ndarray,
                      filters: Tuple[FrequencyFilter, FrequencyFilter]) -> KSpaceGrid:
    """
    k-пространство частотной ветви до взятия модуля.

    Низкая полоса копируется из x_ori, высокая смешивается по маске:
    Φ_h(f_ori)⊙𝓜 + Φ_h(f_gen)⊙(1 − 𝓜) + Φ_l(f_ori).
    """
    check_same_shape(ori_kspace, x_gen, mask)
    low, high = filters
    f_gen = dft2(x_gen)
    high_band = apply_filter(high, ori_kspace) * mask + apply_filter(high, f_gen) * (1.0 - mask)
    # вне высокой полосы high_band равен нулю, так что низкая полоса копируется точно
    return np.where(low.mask(ori_kspace.shape), apply_filter(low, ori_kspace), high_band)


def freq_reorganize(ori_kspace: KSpaceGrid, x_gen: np.ndarray, mask: np.ndarray,
                    filters: Tuple[FrequencyFilter, FrequencyFilter]) -> Image:
    """
    Перестройка в частотном домене: x' = |𝓕⁻¹(...)|.

    Args:
        ori_kspace (KSpaceGrid): dft2 испорченного изображения
        x_gen (np.ndarray): Выход шага обратного процесса
        mask (np.ndarray): Взвешенная маска 𝓜_t со значениями в [0, 1]
        filters (tuple): (Φ_l, Φ_h)

    Returns:
        Image: Перестроенное изображение (без ограничения диапазона)
    """
    return magnitude(idft2(reorganize_kspace(ori_kspace, x_gen, mask, filters)))


def pixel_reorganize(x_forward: np.ndarray, x_gen: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """x'' = x^for ⊙ 𝓜 + x_gen ⊙ (1 − 𝓜)."""
    check_same_shape(x_forward, x_gen, mask)
    return x_forward * mask + x_gen * (1.0 - mask)


@dataclass(frozen=True)
class TraceRecord:
    t: int
    omega: float
    gamma: float
    psnr: Optional[float] = None


@dataclass
class PurifyTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def to_tsv(self) -> str:
        lines = ["t\tomega\tgamma\tpsnr"]
        for record in self.records:
            value = "" if record.psnr is None else repr(record.psnr)
            lines.append(f"{record.t}\t{record.omega!r}\t{record.gamma!r}\t{value}")
        return "\n".join(lines) + "\n"


def _balance(config: PurifyConfig, t: int) -> float:
    if config.balance == "frequency":
        return 1.0
    if config.balance == "pixel":
        return 0.0
    return gamma(t, config.T, config.a)


def _base_mask(config: PurifyConfig, state: MaskState) -> np.ndarray:
    if config.guidance == "full":
        return np.ones((state.height, state.width))
    if config.guidance == "none":
        return np.zeros((state.height, state.width))
    return state.mask()


def purify(x_ori: np.ndarray, config: PurifyConfig, schedule: NoiseSchedule,
           denoiser: Denoiser, reference: Optional[np.ndarray] = None,
           rng: Optional[np.random.Generator] = None,
           trace: bool = False) -> Tuple[Image, PurifyTrace]:
    """
    Полный цикл очистки от x_T ~ N(0, I) до x̃_0.

    На каждом шаге i = T..1: шаг обратного процесса (с ограничением x̂_0
    диапазоном [0, 1], если clip_denoised), маска 𝓜_i = ω_i·m_i,
    перестройка в частотном домене, прямой процесс для x_ori, перестройка
    в пиксельном домене, смешивание x̃ = γ_i·x' + (1 − γ_i)·x''.
    Чётность маски на шаге T равна 0 и меняется на каждом шаге.

    Args:
        x_ori (np.ndarray): Испорченное изображение
        config (PurifyConfig): Параметры очистки
        schedule (NoiseSchedule): Расписание шума, schedule.T == config.T
        denoiser (Denoiser): Предсказатель шума
        reference (np.ndarray | None): Чистое изображение для PSNR в трассе
        rng (np.random.Generator | None): Генератор; по умолчанию из config.seed
        trace (bool): Записывать ли трассу по шагам

    Returns:
        tuple: (clamp(x̃_0), трасса)

    Raises:
        ConfigError: несовместимые параметры и размер изображения
        NonFiniteLatentError: латент перестал быть конечным
    """
    x_ori = check_image(x_ori, "x_ori")
    height, width = x_ori.shape
    if schedule.T != config.T:
        raise ConfigError(f"Расписание на {schedule.T} шагов, а конфигурация на {config.T}")
    if config.grid_size > min(height, width):
        raise ConfigError(f"grid_size={config.grid_size} больше размера изображения {x_ori.shape}")
    if reference is not None:
        check_same_shape(x_ori, reference)
    if rng is None:
        rng = np.random.default_rng(config.seed)

    filters = make_filter_pair(config.cutoff, config.phase_axis)
    ori_kspace = dft2(x_ori)
    state = MaskState(height, width, config.grid_size, parity=0)
    records = []

    clip_range = DATA_RANGE if config.clip_denoised else None

    x = rng.standard_normal(x_ori.shape)
    for i in range(config.T, 0, -1):
        x_gen = reverse_step(schedule, denoiser, x, i, rng.standard_normal(x_ori.shape),
                             variance=config.reverse_variance, clip_range=clip_range)

        omega = mask_weight(schedule, i)
        m = _base_mask(config, state)
        mask_freq = omega * m if config.omega_frequency else m
        mask_pixel = omega * m if config.omega_pixel else m

        x_freq = freq_reorganize(ori_kspace, x_gen, mask_freq, filters)
        x_forward = forward_sample(schedule, x_ori, i, rng.standard_normal(x_ori.shape))
        x_pixel = pixel_reorganize(x_forward, x_gen, mask_pixel)

        g = _balance(config, i)
        x = g * x_freq + (1.0 - g) * x_pixel
        if not np.all(np.isfinite(x)):
            raise NonFiniteLatentError(i)

        if trace:
            score = psnr(clamp(x), reference) if reference is not None else None
            records.append(TraceRecord(t=i, omega=omega, gamma=g, psnr=score))
        state = state.flip()

    return clamp(x), PurifyTrace(records)
