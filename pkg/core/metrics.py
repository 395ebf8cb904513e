"""
Полноопорные метрики качества (PSNR, SSIM, GMSD) и U-критерий
Манна–Уитни для сравнения выборок значений метрик.
"""
import itertools
import math
from typing import Sequence

import numpy as np
from scipy import signal, stats
from skimage import metrics as sk_metrics

from core.errors import ConfigError, ShapeMismatchError
from core.kspace import check_same_shape
from schema.report import MetricReport, UTestResult


PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
GMSD_CONSTANT = 170.0
# порог нормального приближения и предел полного перебора
EXACT_MIN_SIZE = 8
EXACT_MAX_ASSIGNMENTS = 200_000


def psnr(x: np.ndarray, ref: np.ndarray) -> float:
    """PSNR с пиком 1.0; при MSE < 1e-10 возвращает PSNR_CAP."""
    check_same_shape(x, ref)
    mse = sk_metrics.mean_squared_error(np.asarray(ref, dtype=np.float64),
                                        np.asarray(x, dtype=np.float64))
    if mse < 1e-10:
        return PSNR_CAP
    return float(10.0 * np.log10(1.0 / mse))


def ssim(x: np.ndarray, ref: np.ndarray) -> float:
    """
    Одномасштабный SSIM: гауссово окно 11 пикселей, σ = 1.5,
    K1 = 0.01, K2 = 0.03, динамический диапазон 1.0.
    """
    check_same_shape(x, ref)
    if min(np.shape(x)) < SSIM_WINDOW:
        raise ShapeMismatchError(f"Изображение {np.shape(x)} меньше окна SSIM {SSIM_WINDOW}")
    return float(sk_metrics.structural_similarity(
        np.asarray(ref, dtype=np.float64), np.asarray(x, dtype=np.float64),
        win_size=SSIM_WINDOW, gaussian_weights=True, sigma=SSIM_SIGMA,
        use_sample_covariance=False, data_range=1.0, K1=0.01, K2=0.03,
    ))


def _gradient_magnitude(image: np.ndarray) -> np.ndarray:
    kernel = np.ones((2, 2)) / 4.0
    averaged = signal.convolve2d(image, kernel, mode="same", boundary="symm")[::2, ::2]
    dx = np.array([[1, 0, -1], [1, 0, -1], [1, 0, -1]]) / 3.0
    gx = signal.convolve2d(averaged, dx, mode="same", boundary="symm")
    gy = signal.convolve2d(averaged, dx.T, mode="same", boundary="symm")
    return np.sqrt(gx ** 2 + gy ** 2)


def gmsd(x: np.ndarray, ref: np.ndarray) -> float:
    """
    GMSD: стандартное отклонение карты сходства модулей градиента.

    Изображения переводятся в шкалу [0, 255], усредняются окном 2×2 с
    прореживанием в 2 раза, градиенты считаются ядрами Превитта 3×3.
    """
    check_same_shape(x, ref)
    g1 = _gradient_magnitude(255.0 * np.asarray(ref, dtype=np.float64))
    g2 = _gradient_magnitude(255.0 * np.asarray(x, dtype=np.float64))
    quality = (2.0 * g1 * g2 + GMSD_CONSTANT) / (g1 ** 2 + g2 ** 2 + GMSD_CONSTANT)
    return float(np.std(quality))


def evaluate_pair(x: np.ndarray, ref: np.ndarray, name: str = "") -> MetricReport:
    return MetricReport(name=name, psnr=psnr(x, ref), ssim=ssim(x, ref), gmsd=gmsd(x, ref))


def total_score(report: MetricReport) -> float:
    """Сводная метрика: полезные метрики складываются, GMSD вычитается."""
    return report.psnr + report.ssim - report.gmsd


def summarize(reports: Sequence[MetricReport], name: str = "mean") -> MetricReport:
    if not reports:
        raise ConfigError("Нет отчётов для усреднения")
    return MetricReport(
        name=name,
        psnr=float(np.mean([r.psnr for r in reports])),
        ssim=float(np.mean([r.ssim for r in reports])),
        gmsd=float(np.mean([r.gmsd for r in reports])),
    )


def _u_statistic(ranks: np.ndarray, n1: int) -> float:
    return float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)


def _exact_p(ranks: np.ndarray, n1: int, u_obs: float) -> float:
    center = n1 * (len(ranks) - n1) / 2.0
    observed = abs(u_obs - center) - 1e-9
    extreme = total = 0
    offset = n1 * (n1 + 1) / 2.0
    for group in itertools.combinations(range(len(ranks)), n1):
        u = ranks[list(group)].sum() - offset
        total += 1
        if abs(u - center) >= observed:
            extreme += 1
    return extreme / total


def _normal_p(ranks: np.ndarray, n1: int, n2: int, u_obs: float) -> float:
    n = n1 + n2
    _, counts = np.unique(ranks, return_counts=True)
    tie = float(np.sum(counts ** 3 - counts))
    variance = n1 * n2 / 12.0 * ((n + 1) - tie / (n * (n - 1)))
    if variance <= 0:
        return 1.0
    z = (abs(u_obs - n1 * n2 / 2.0) - 0.5) / math.sqrt(variance)
    return float(min(1.0, 2.0 * stats.norm.sf(max(z, 0.0))))


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float]) -> UTestResult:
    """
    Двусторонний U-критерий Манна–Уитни.

    U считается по сумме средних рангов выборки a. При min(n1, n2) < 8
    (и числе разбиений не больше EXACT_MAX_ASSIGNMENTS) p-значение
    находится полным перебором разбиений объединённых рангов, иначе
    нормальным приближением с поправками на связки и непрерывность.

    Args:
        sample_a (Sequence[float]): Первая выборка
        sample_b (Sequence[float]): Вторая выборка

    Returns:
        UTestResult: U, p и размеры выборок

    Raises:
        ConfigError: пустая выборка
    """
    n1, n2 = len(sample_a), len(sample_b)
    if n1 == 0 or n2 == 0:
        raise ConfigError("Выборки для U-критерия не должны быть пустыми")
    ranks = stats.rankdata(np.concatenate([np.asarray(sample_a, float),
                                           np.asarray(sample_b, float)]))
    u = _u_statistic(ranks, n1)
    exact = min(n1, n2) < EXACT_MIN_SIZE and math.comb(n1 + n2, n1) <= EXACT_MAX_ASSIGNMENTS
    p = _exact_p(ranks, n1, u) if exact else _normal_p(ranks, n1, n2, u)
    return UTestResult(u_statistic=u, p_value=p, n1=n1, n2=n2, exact=exact)
