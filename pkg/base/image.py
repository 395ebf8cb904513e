import struct
from pathlib import Path
from typing import List, Union

import numpy as np
from PIL import Image as PILImage

from core.errors import ImageFormatError
from core.kspace import Image, clamp


RAW_MAGIC = b"PFIM"
RAW_HEADER = struct.Struct("<4sHH")
IMAGE_SUFFIXES = (".png", ".pfim")
PNG_PEAK = 65535.0


def suffix_for(image_format: str) -> str:
    return ".pfim" if image_format == "raw" else ".png"


def list_images(directory: Union[str, Path]) -> List[Path]:
    """Файлы изображений каталога, отсортированные по имени."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Каталог {directory} не найден")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)


def read_image(path: Union[str, Path]) -> Image:
    """
    Читает изображение в [0, 1].

    Args:
        path (str | Path): Файл .png (8 или 16 бит) или .pfim

    Returns:
        Image: Массив float64

    Raises:
        FileNotFoundError: файла нет
        ImageFormatError: формат не распознан или файл повреждён
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Файл {path} не найден")
    if path.suffix.lower() == ".pfim":
        return _read_raw(path)

    try:
        with PILImage.open(path) as img:
            if img.mode in ("I;16", "I;16L", "I;16B", "I"):
                data = np.asarray(img, dtype=np.float64) / PNG_PEAK
            else:
                data = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    except OSError as e:
        raise ImageFormatError(f"Не удалось прочитать {path}: {e}") from e
    return clamp(data)


def _read_raw(path: Path) -> Image:
    payload = path.read_bytes()
    if len(payload) < RAW_HEADER.size:
        raise ImageFormatError(f"{path}: файл короче заголовка")
    magic, height, width = RAW_HEADER.unpack_from(payload)
    if magic != RAW_MAGIC:
        raise ImageFormatError(f"{path}: неверная сигнатура {magic!r}")
    expected = RAW_HEADER.size + 4 * height * width
    if len(payload) != expected or height == 0 or width == 0:
        raise ImageFormatError(f"{path}: ожидалось {expected} байт, получено {len(payload)}")
    data = np.frombuffer(payload, dtype="<f4", offset=RAW_HEADER.size)
    return data.reshape(height, width).astype(np.float64)


def write_image(path: Union[str, Path], image: np.ndarray) -> Path:
    """Пишет изображение; формат по расширению, в PNG квантуется до 16 бит."""
    path = Path(path)
    image = clamp(np.asarray(image, dtype=np.float64))
    if image.ndim != 2 or max(image.shape) > 65535:
        raise ImageFormatError(f"Недопустимый размер изображения {image.shape}")
    path.parent.mkdir(parents=True, exist_ok=True)

    if path.suffix.lower() == ".pfim":
        header = RAW_HEADER.pack(RAW_MAGIC, *image.shape)
        path.write_bytes(header + image.astype("<f4").tobytes())
    elif path.suffix.lower() == ".png":
        quantized = np.round(image * PNG_PEAK).astype(np.uint16)
        PILImage.fromarray(quantized).save(path, format="PNG")
    else:
        raise ImageFormatError(f"Неизвестное расширение {path.suffix}")
    return path
