"""
Небольшая сеть предсказания шума: трёхуровневый энкодер–декодер со
skip-соединениями и синусоидальным эмбеддингом шага на каждом уровне.
"""
import math

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from core.diffusion import NoiseSchedule
from core.errors import ShapeMismatchError


CHECKPOINT_VERSION = 1
_LEVEL_FACTOR = 4


def _groups(channels: int) -> int:
    return math.gcd(8, channels)


class SinusoidalEmbedding(nn.Module):
    def __init__(self, dim: int) -> None:
        super().__init__()
        self.dim = dim

    def forward(self, t: torch.Tensor) -> torch.Tensor:
        half = self.dim // 2
        freqs = torch.exp(-math.log(10000.0) * torch.arange(half, dtype=torch.float32) / half)
        args = t.float()[:, None] * freqs[None, :]
        return torch.cat([torch.sin(args), torch.cos(args)], dim=1)


class ConvBlock(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, time_dim: int) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1)
        self.norm1 = nn.GroupNorm(_groups(out_channels), out_channels)
        self.time = nn.Linear(time_dim, out_channels)
        self.conv2 = nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1)
        self.norm2 = nn.GroupNorm(_groups(out_channels), out_channels)

    def forward(self, x: torch.Tensor, emb: torch.Tensor) -> torch.Tensor:
        x = F.silu(self.norm1(self.conv1(x)))
        x = x + self.time(emb)[:, :, None, None]
        return F.silu(self.norm2(self.conv2(x)))


class NoiseNet(nn.Module):
    """
    Энкодер–декодер ε_θ(x_t, t) для одноканальных изображений.

    Attributes:
        base_channels (int): Ширина первого уровня; уровни c, 2c, 4c
        time_dim (int): Размер эмбеддинга шага
    """

    def __init__(self, base_channels: int = 16, time_dim: int = 64) -> None:
        super().__init__()
        self.base_channels = base_channels
        self.time_dim = time_dim
        c1, c2, c3 = base_channels, 2 * base_channels, 4 * base_channels

        self.embedding = SinusoidalEmbedding(time_dim)
        self.time_mlp = nn.Sequential(nn.Linear(time_dim, time_dim), nn.SiLU(),
                                      nn.Linear(time_dim, time_dim))
        self.enc1 = ConvBlock(1, c1, time_dim)
        self.enc2 = ConvBlock(c1, c2, time_dim)
        self.bottleneck = ConvBlock(c2, c3, time_dim)
        self.up2 = nn.ConvTranspose2d(c3, c2, kernel_size=2, stride=2)
        self.dec2 = ConvBlock(2 * c2, c2, time_dim)
        self.up1 = nn.ConvTranspose2d(c2, c1, kernel_size=2, stride=2)
        self.dec1 = ConvBlock(2 * c1, c1, time_dim)
        self.head = nn.Conv2d(c1, 1, kernel_size=1)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, x: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
        height, width = x.shape[-2:]
        pad_h = (-height) % _LEVEL_FACTOR
        pad_w = (-width) % _LEVEL_FACTOR
        if pad_h or pad_w:
            x = F.pad(x, (0, pad_w, 0, pad_h), mode="reflect")

        emb = self.time_mlp(self.embedding(t))
        skip1 = self.enc1(x, emb)
        skip2 = self.enc2(F.avg_pool2d(skip1, 2), emb)
        h = self.bottleneck(F.avg_pool2d(skip2, 2), emb)
        h = self.dec2(torch.cat([self.up2(h), skip2], dim=1), emb)
        h = self.dec1(torch.cat([self.up1(h), skip1], dim=1), emb)
        return self.head(h)[..., :height, :width]


class ToyDenoiser:
    """
    Обученная сеть за интерфейсом Denoiser.

    Веса после построения не меняются, поэтому predict можно вызывать из
    нескольких потоков одновременно.

    Attributes:
        network (NoiseNet): Сеть в режиме eval
        schedule (NoiseSchedule): Расписание, с которым сеть обучалась
        version (int): Версия формата контрольной точки
    """

    def __init__(self, network: NoiseNet, schedule: NoiseSchedule,
                 version: int = CHECKPOINT_VERSION) -> None:
        self.network = network.eval()
        self.schedule = schedule
        self.version = version

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.network.parameters())

    def predict(self, x_t: np.ndarray, t: int) -> np.ndarray:
        x_t = np.asarray(x_t)
        if x_t.ndim != 2:
            raise ShapeMismatchError(f"Ожидается латент H×W, получено {x_t.shape}")
        self.schedule.check_step(t)
        with torch.no_grad():
            x = torch.from_numpy(np.ascontiguousarray(x_t, dtype=np.float32))[None, None]
            steps = torch.full((1,), float(t))
            eps = self.network(x, steps)[0, 0]
        return eps.numpy().astype(np.float64)
