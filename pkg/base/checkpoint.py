"""
Бинарный формат контрольной точки предсказателя шума.

    magic "PFADCKPT"
    u32 версия
    f64 T, beta_start, beta_end
    u32 base_channels, u32 time_dim
    u32 число тензоров; на тензор: u16 длина имени, имя UTF-8,
        u8 число осей, u32 размеры
    веса float32 little-endian в порядке таблицы
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np
import torch

from core.diffusion import make_schedule
from core.errors import CheckpointError
from core.network import CHECKPOINT_VERSION, NoiseNet, ToyDenoiser


MAGIC = b"PFADCKPT"
_HEADER = struct.Struct("<8sIdddII")
_COUNT = struct.Struct("<I")


def save_checkpoint(path: Union[str, Path], denoiser: ToyDenoiser) -> Path:
    path = Path(path)
    network = denoiser.network
    schedule = denoiser.schedule
    state = network.state_dict()

    chunks = [_HEADER.pack(MAGIC, CHECKPOINT_VERSION, float(schedule.T), schedule.beta_start,
                           schedule.beta_end, network.base_channels, network.time_dim),
              _COUNT.pack(len(state))]
    for name, tensor in state.items():
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)) + encoded)
        chunks.append(struct.pack(f"<B{tensor.dim()}I", tensor.dim(), *tensor.shape))
    for tensor in state.values():
        chunks.append(tensor.detach().cpu().numpy().astype("<f4").tobytes())

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    return path


def load_checkpoint(path: Union[str, Path]) -> ToyDenoiser:
    """
    Загружает контрольную точку.

    Проверяются сигнатура, версия, совпадение таблицы размеров с сетью,
    построенной по записанным ширинам, и общее число весов.

    Args:
        path (str | Path): Путь к файлу

    Returns:
        ToyDenoiser: Предсказатель с расписанием из файла

    Raises:
        CheckpointError: файл повреждён или несовместим
    """
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Не удалось прочитать {path}: {e}") from e

    try:
        magic, version, steps, beta_start, beta_end, base_channels, time_dim = \
            _HEADER.unpack_from(payload)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: неверная сигнатура {magic!r}")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"{path}: версия {version} не поддерживается")
        offset = _HEADER.size
        (count,) = _COUNT.unpack_from(payload, offset)
        offset += _COUNT.size

        table = []
        for _ in range(count):
            (length,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            name = payload[offset:offset + length].decode("utf-8")
            offset += length
            (ndim,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", payload, offset)
            offset += 4 * ndim
            table.append((name, tuple(shape)))
    except (struct.error, UnicodeDecodeError) as e:
        raise CheckpointError(f"{path}: заголовок повреждён: {e}") from e

    network = NoiseNet(base_channels, time_dim)
    expected = [(name, tuple(t.shape)) for name, t in network.state_dict().items()]
    if table != expected:
        raise CheckpointError(f"{path}: таблица слоёв не совпадает с архитектурой")

    total = sum(int(np.prod(shape)) for _, shape in table)
    if len(payload) - offset != 4 * total:
        raise CheckpointError(
            f"{path}: ожидалось {total} весов, в файле {(len(payload) - offset) // 4}"
        )

    weights = np.frombuffer(payload, dtype="<f4", offset=offset)
    state = {}
    position = 0
    for name, shape in table:
        size = int(np.prod(shape))
        state[name] = torch.from_numpy(weights[position:position + size].reshape(shape).copy())
        position += size
    network.load_state_dict(state)

    schedule = make_schedule(int(steps), beta_start, beta_end)
    return ToyDenoiser(network, schedule, version=version)
