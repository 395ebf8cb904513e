"""
Представления изображения и k-пространства, унитарное ДПФ и идеальные
комплементарные фильтры вдоль оси фазового кодирования.

Соглашения:
    - изображение: вещественный массив H×W, значения в [0, 1];
    - k-пространство: комплексный массив H×W, DC в центре сетки
      (строка H//2, столбец W//2);
    - нормировка ДПФ унитарная (1/√(HW) в обе стороны), поэтому
      Σ|G|² = Σx².
"""
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from core.errors import ConfigError, ShapeMismatchError


Image = NDArray[np.float64]
KSpaceGrid = NDArray[np.complex128]

PHASE_AXIS = 0

# граница |k_y| == cutoff относится к низким частотам
_BOUNDARY_TOL = 1e-12


def check_image(image: np.ndarray, name: str = "image") -> Image:
    """
    Проверяет, что массив является конечным двумерным изображением.

    Args:
        image (np.ndarray): Проверяемый массив
        name (str): Имя для сообщения об ошибке

    Returns:
        Image: Массив float64
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or min(image.shape) < 1:
        raise ShapeMismatchError(f"{name}: ожидается массив H×W, получено {image.shape}")
    if not np.all(np.isfinite(image)):
        raise ShapeMismatchError(f"{name}: есть нечисловые значения")
    return image


def check_same_shape(*arrays: np.ndarray) -> None:
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"Размеры не совпадают: {sorted(shapes)}")


def dft2(image: np.ndarray) -> KSpaceGrid:
    """Унитарное двумерное ДПФ с DC в центре сетки."""
    shifted = np.fft.ifftshift(np.asarray(image))
    return np.fft.fftshift(np.fft.fft2(shifted, norm="ortho"))


def idft2(grid: np.ndarray) -> NDArray[np.complex128]:
    """
    Обратное к :func:`dft2`. Возвращает комплексный растр, модуль берёт
    вызывающий код через :func:`magnitude`.
    """
    grid = np.asarray(grid)
    if grid.ndim != 2 or min(grid.shape) < 1:
        raise ShapeMismatchError(f"Ожидается сетка H×W, получено {grid.shape}")
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(grid), norm="ortho"))


def magnitude(raster: np.ndarray) -> Image:
    return np.abs(raster)


def clamp(image: np.ndarray) -> Image:
    return np.clip(image, 0.0, 1.0)


def axis_frequencies(length: int) -> NDArray[np.float64]:
    """
    Частоты бинов центрированной оси в радианах: 2π·(r − n//2)/n,
    диапазон [−π, π).
    """
    return 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(length))


@dataclass(frozen=True)
class FrequencyFilter:
    """
    Идеальный (бинарный) фильтр вдоль оси фазового кодирования.

    Маска зависит только от |k_y| вдоль ``axis`` и постоянна вдоль оси
    считывания. Низкочастотный фильтр пропускает замкнутый интервал
    |k_y| ≤ cutoff, высокочастотный его дополнение.

    Attributes:
        cutoff (float): Частота среза в радианах, (0, π]
        axis (int): Ось фазового кодирования, 0 или 1
        kind (str): "low" или "high"
    """

    cutoff: float
    axis: int = PHASE_AXIS
    kind: Literal["low", "high"] = "low"

    def band(self, length: int) -> NDArray[np.bool_]:
        """Одномерная маска пропускания для оси длины ``length``."""
        low = np.abs(axis_frequencies(length)) <= self.cutoff + _BOUNDARY_TOL
        return low if self.kind == "low" else ~low

    def mask(self, shape: tuple) -> NDArray[np.bool_]:
        if len(shape) != 2 or self.axis not in (0, 1):
            raise ShapeMismatchError(f"Фильтр по оси {self.axis} не подходит к сетке {shape}")
        band = self.band(shape[self.axis])
        if self.axis == 0:
            return np.broadcast_to(band[:, None], shape)
        return np.broadcast_to(band[None, :], shape)

    def complement(self) -> "FrequencyFilter":
        return FrequencyFilter(self.cutoff, self.axis, "high" if self.kind == "low" else "low")


def make_filter(cutoff: float, axis: int = PHASE_AXIS,
                kind: Literal["low", "high"] = "low") -> FrequencyFilter:
    """
    Создаёт идеальный фильтр.

    Args:
        cutoff (float): Частота среза в радианах
        axis (int): Ось фазового кодирования
        kind (str): "low" или "high"

    Returns:
        FrequencyFilter: Фильтр

    Raises:
        ConfigError: cutoff вне (0, π], неизвестная ось или тип
    """
    if not 0.0 < cutoff <= math.pi:
        raise ConfigError(f"Частота среза {cutoff} вне (0, π]")
    if axis not in (0, 1):
        raise ConfigError(f"Ось фазового кодирования должна быть 0 или 1, получено {axis}")
    if kind not in ("low", "high"):
        raise ConfigError(f"Неизвестный тип фильтра: {kind}")
    return FrequencyFilter(cutoff=float(cutoff), axis=axis, kind=kind)


def make_filter_pair(cutoff: float, axis: int = PHASE_AXIS) -> tuple:
    """Пара (Φ_l, Φ_h) с общей частотой среза."""
    low = make_filter(cutoff, axis, "low")
    return low, low.complement()


def apply_filter(filt: FrequencyFilter, grid: np.ndarray) -> KSpaceGrid:
    grid = np.asarray(grid)
    if grid.ndim != 2 or filt.axis not in (0, 1) or grid.shape[filt.axis] < 2:
        raise ShapeMismatchError(
            f"Сетка {grid.shape} не подходит для фильтра по оси {filt.axis}"
        )
    # np.where вместо умножения: сумма дополнений восстанавливает вход бит в бит
    return np.where(filt.mask(grid.shape), grid, 0)
