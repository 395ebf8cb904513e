"""
Моделирование артефактов движения возмущением фазы строк k-пространства.

Строки с |k_y| > k0 умножаются на e^(−jΦ(k_y)), остальные не меняются.
Жёсткое движение: сдвиг кодируется линейной фазой, поворот заменой
возмущённых строк строками спектра повёрнутого изображения.
Дыхательное движение: Φ(k_y) = k_y·Δ·sin(m·k_y + n).
"""
import math
from typing import Callable, Tuple, Union

import numpy as np
from scipy import ndimage

from core.errors import ConfigError
from core.kspace import (PHASE_AXIS, Image, KSpaceGrid, axis_frequencies,
                         check_image, clamp, dft2, idft2, magnitude)
from schema.motion import (DEFAULT_K0, DEFAULT_PIXEL_SPACING_CM,
                           RespiratoryParams, RigidMotionParams)


PhaseFunction = Callable[[np.ndarray], np.ndarray]
MotionParams = Union[RigidMotionParams, RespiratoryParams]

_BOUNDARY_TOL = 1e-12


def _along(vector: np.ndarray, axis: int, shape: tuple) -> np.ndarray:
    if axis == 0:
        return np.broadcast_to(vector[:, None], shape)
    return np.broadcast_to(vector[None, :], shape)


def perturbed_rows(length: int, k0: float) -> np.ndarray:
    """Булева маска строк с |k_y| > k0."""
    return np.abs(axis_frequencies(length)) > k0 + _BOUNDARY_TOL


def _corrupt(base: KSpaceGrid, source: KSpaceGrid, phi: PhaseFunction,
             k0: float, axis: int) -> KSpaceGrid:
    if not 0.0 < k0 < math.pi:
        raise ConfigError(f"k0={k0} вне (0, π)")
    if axis not in (0, 1):
        raise ConfigError(f"Ось фазового кодирования должна быть 0 или 1, получено {axis}")

    k_y = axis_frequencies(base.shape[axis])
    phase = np.asarray(phi(k_y), dtype=np.float64)
    if phase.shape != k_y.shape or not np.all(np.isfinite(phase)):
        raise ConfigError("Фазовая функция должна давать конечное значение для каждой строки")

    rows = _along(perturbed_rows(base.shape[axis], k0), axis, base.shape)
    ramp = _along(np.exp(-1j * phase), axis, base.shape)
    return np.where(rows, source * ramp, base)


def perturb_phase(grid: KSpaceGrid, phi: PhaseFunction, k0: float,
                  axis: int = PHASE_AXIS) -> KSpaceGrid:
    """
    Умножает строки с |k_y| > k0 на e^(−jΦ(k_y)).

    Args:
        grid (KSpaceGrid): Центрированное k-пространство
        phi (Callable): Φ(k_y) в радианах, вызывается на векторе частот строк
        k0 (float): Частота начала возмущения, (0, π)
        axis (int): Ось фазового кодирования

    Returns:
        KSpaceGrid: Возмущённое k-пространство

    Raises:
        ConfigError: k0 вне диапазона или Φ не конечна
    """
    grid = np.asarray(grid, dtype=np.complex128)
    return _corrupt(grid, grid, phi, k0, axis)


def rotate(image: Image, angle_deg: float) -> Image:
    """Поворот в плоскости изображения: билинейно, вне границ нули."""
    return ndimage.rotate(image, angle_deg, reshape=False, order=1,
                          mode="constant", cval=0.0)


def simulate_rigid(clean: np.ndarray, params: RigidMotionParams,
                   axis: int = PHASE_AXIS) -> Image:
    clean = check_image(clean, "clean")
    f_clean = dft2(clean)
    source = dft2(rotate(clean, params.rotation_deg)) if params.rotation_deg else f_clean
    shift = params.shift_px
    corrupted = _corrupt(f_clean, source, lambda k_y: k_y * shift, params.k0, axis)
    return clamp(magnitude(idft2(corrupted)))


def simulate_respiratory(clean: np.ndarray, params: RespiratoryParams,
                         axis: int = PHASE_AXIS) -> Image:
    clean = check_image(clean, "clean")
    amplitude = params.amplitude_px

    def phi(k_y: np.ndarray) -> np.ndarray:
        return k_y * amplitude * np.sin(params.period_m * k_y + params.phase_n)

    corrupted = perturb_phase(dft2(clean), phi, params.k0, axis)
    return clamp(magnitude(idft2(corrupted)))


def simulate(clean: np.ndarray, params: MotionParams, axis: int = PHASE_AXIS) -> Image:
    if isinstance(params, RigidMotionParams):
        return simulate_rigid(clean, params, axis)
    if isinstance(params, RespiratoryParams):
        return simulate_respiratory(clean, params, axis)
    raise ConfigError(f"Неизвестный тип параметров движения: {type(params).__name__}")


def draw_rigid_params(seed: int,
                      delta_range: Tuple[float, float] = (2.5, 3.0),
                      rotation_range: Tuple[float, float] = (-2.0, 2.0),
                      k0: float = DEFAULT_K0,
                      pixel_spacing_cm: float = DEFAULT_PIXEL_SPACING_CM) -> RigidMotionParams:
    """
    Случайные параметры жёсткого движения из заданных диапазонов.

    Args:
        seed (int): Зерно генератора
        delta_range (tuple): Диапазон сдвига, см
        rotation_range (tuple): Диапазон угла, градусы
        k0 (float): Частота начала возмущения
        pixel_spacing_cm (float): Размер пикселя, см

    Returns:
        RigidMotionParams: Параметры с записанным зерном
    """
    rng = np.random.default_rng(seed)
    return RigidMotionParams(
        delta_k=float(rng.uniform(*delta_range)),
        rotation_deg=float(rng.uniform(*rotation_range)),
        k0=k0,
        pixel_spacing_cm=pixel_spacing_cm,
        seed=seed,
    )


def draw_respiratory_params(seed: int,
                            delta_range: Tuple[float, float] = (1.1, 1.2),
                            period_range: Tuple[float, float] = (0.1, 5.0),
                            phase_range: Tuple[float, float] = (0.0, math.pi / 4),
                            k0: float = DEFAULT_K0,
                            pixel_spacing_cm: float = DEFAULT_PIXEL_SPACING_CM) -> RespiratoryParams:
    rng = np.random.default_rng(seed)
    return RespiratoryParams(
        delta_k=float(rng.uniform(*delta_range)),
        period_m=float(rng.uniform(*period_range)),
        phase_n=float(rng.uniform(*phase_range)),
        k0=k0,
        pixel_spacing_cm=pixel_spacing_cm,
        seed=seed,
    )
