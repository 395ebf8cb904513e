import numpy as np

from core.kspace import Image
from schema.motion import PhantomSpec


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def generate_phantom(spec: PhantomSpec) -> Image:
    """
    Синтетический фантом из наложенных эллипсов с мягкими краями.

    Первый эллипс задаёт центрированное "тело", остальные добавляют структуры внутри
    него. Каждый эллипс накладывается поверх предыдущих с весом,
    плавно спадающим на краю шириной около полутора пикселей.

    Args:
        spec (PhantomSpec): Размер, число эллипсов, диапазон яркости, зерно

    Returns:
        Image: Изображение spec.size×spec.size со значениями в [0, 1]
    """
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.intensity_range
    coords = np.linspace(-1.0, 1.0, spec.size)
    y, x = np.meshgrid(coords, coords, indexing="ij")
    edge = 3.0 / spec.size

    image = np.zeros((spec.size, spec.size))
    for index in range(spec.ellipse_count):
        if index == 0:
            cx = cy = 0.0
            a, b = rng.uniform(0.6, 0.9, size=2)
        else:
            cx, cy = rng.uniform(-0.45, 0.45, size=2)
            a, b = rng.uniform(0.08, 0.35, size=2)
        theta = rng.uniform(0.0, np.pi)
        value = rng.uniform(lo, hi)

        u = (x - cx) * np.cos(theta) + (y - cy) * np.sin(theta)
        v = -(x - cx) * np.sin(theta) + (y - cy) * np.cos(theta)
        radius = np.sqrt((u / a) ** 2 + (v / b) ** 2)
        weight = _smoothstep((1.0 - radius) / edge)
        image = image * (1.0 - weight) + value * weight

    return np.clip(image, 0.0, 1.0)
