import math
import re
from typing import List, Literal, Optional

from pydantic import BaseModel, Extra, validator, root_validator

from schema.motion import DEFAULT_PIXEL_SPACING_CM


_PI_EXPR = re.compile(r"^\s*(?:(?P<coef>[0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<div>[0-9.]+))?\s*$")


def parse_angle(value):
    """
    Принимает число или выражение вида "pi/10", "0.25*pi", "2pi/3".

    Args:
        value: Значение из файла конфигурации или флага

    Returns:
        float: Угол в радианах
    """
    if isinstance(value, str):
        match = _PI_EXPR.match(value.lower())
        if match:
            coef = float(match.group("coef") or 1.0)
            div = float(match.group("div") or 1.0)
            return coef * math.pi / div
    return value


class TrainConfig(BaseModel):
    steps: int = 2000
    batch_size: int = 4
    learning_rate: float = 1e-4
    base_channels: int = 16
    time_dim: int = 64
    holdout_fraction: float = 0.125
    holdout_draws: int = 8
    seed: int = 0

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    @validator("steps")
    def _steps(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Бюджет обучения должен быть положительным")
        return value

    @validator("batch_size", "base_channels", "holdout_draws")
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Значение должно быть положительным")
        return value

    @validator("time_dim")
    def _time_dim(cls, value: int) -> int:
        if value < 2 or value % 2:
            raise ValueError("time_dim должно быть чётным и не меньше 2")
        return value

    @validator("learning_rate")
    def _lr(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("learning_rate должно быть положительным")
        return value

    @validator("holdout_fraction")
    def _fraction(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError("holdout_fraction должно лежать в (0, 1)")
        return value


class PurifyConfig(BaseModel):
    """
    Параметры очистки.

    balance: dual: γ_t по формуле; frequency: γ ≡ 1; pixel: γ ≡ 0.
    guidance: alternate: шахматная маска с чередованием чётности;
    none: 𝓜 ≡ 0; full: 𝓜 ≡ 1.
    omega_frequency / omega_pixel: умножать ли маску на ω_t в каждом домене.
    reverse_variance: дисперсия шага обратного процесса, β_t или β̃_t.
    clip_denoised: ограничивать ли оценку x̂_0 диапазоном [0, 1] на каждом шаге.
    """

    T: int = 1000
    a: float = 0.7
    cutoff: float = math.pi / 10
    grid_size: int = 16
    phase_axis: int = 0
    seed: int = 0
    balance: Literal["dual", "frequency", "pixel"] = "dual"
    guidance: Literal["alternate", "none", "full"] = "alternate"
    omega_frequency: bool = True
    omega_pixel: bool = True
    reverse_variance: Literal["beta", "posterior"] = "beta"
    clip_denoised: bool = True
    oracle: bool = False
    checkpoint: Optional[str] = None

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    _cutoff_angle = validator("cutoff", pre=True, allow_reuse=True)(parse_angle)

    @validator("T")
    def _steps(cls, value: int) -> int:
        if value < 1:
            raise ValueError("T должно быть положительным")
        return value

    @validator("a")
    def _a(cls, value: float) -> float:
        if not 0 <= value <= 1:
            raise ValueError("a должно лежать в [0, 1]")
        return value

    @validator("cutoff")
    def _cutoff(cls, value: float) -> float:
        if not 0 < value < math.pi:
            raise ValueError("cutoff должно лежать в (0, π)")
        return value

    @validator("grid_size")
    def _grid(cls, value: int) -> int:
        if value < 1:
            raise ValueError("grid_size должно быть не меньше 1")
        return value

    @validator("phase_axis")
    def _axis(cls, value: int) -> int:
        if value not in (0, 1):
            raise ValueError("phase_axis должно быть 0 или 1")
        return value


PROFILES = {
    "desk": {"image_size": 64, "timesteps": 100, "reverse_variance": "posterior"},
    "full": {"image_size": 256, "timesteps": 1000, "reverse_variance": "beta"},
}

SWEEP_DEFAULTS = {
    "a": "0.1,0.3,0.5,0.7,0.9",
    "cutoff": "pi/5,pi/10,pi/20",
    "grid": "1,4,16,64",
    "domain": "dual,frequency,pixel",
    "mask": "full,none,no_omega,omega_frequency,omega_pixel",
}


class RunConfig(BaseModel):
    """
    Полная конфигурация команды.

    Источники по возрастанию приоритета: значения по умолчанию, профиль,
    файл конфигурации, флаги командной строки. Неизвестные ключи
    отклоняются.
    """

    profile: Literal["desk", "full"] = "desk"
    seed: int = 0
    workers: Optional[int] = None
    out: Optional[str] = None

    # входные данные
    input_dir: Optional[str] = None
    manifest: Optional[str] = None
    reference_dir: Optional[str] = None
    candidate_dir: Optional[str] = None
    baseline_dir: Optional[str] = None
    oracle_target_dir: Optional[str] = None
    image_format: Optional[Literal["png", "raw"]] = None

    # фантомы
    phantom_count: int = 8
    image_size: Optional[int] = None
    ellipse_count: int = 6
    intensity_lo: float = 0.2
    intensity_hi: float = 1.0

    # симулятор
    simulator: Literal["rigid", "respiratory"] = "rigid"
    delta_k_min: Optional[float] = None
    delta_k_max: Optional[float] = None
    rotation_max_deg: float = 2.0
    period_min: float = 0.1
    period_max: float = 5.0
    phase_max: float = math.pi / 4
    k0: float = math.pi / 10
    pixel_spacing_cm: float = DEFAULT_PIXEL_SPACING_CM

    # расписание
    timesteps: Optional[int] = None
    beta_start: Optional[float] = None
    beta_end: Optional[float] = None

    # очистка
    a: float = 0.7
    cutoff: float = math.pi / 10
    grid_size: int = 16
    phase_axis: int = 0
    balance: Literal["dual", "frequency", "pixel"] = "dual"
    guidance: Literal["alternate", "none", "full"] = "alternate"
    omega_frequency: bool = True
    omega_pixel: bool = True
    reverse_variance: Optional[Literal["beta", "posterior"]] = None
    clip_denoised: bool = True
    oracle: bool = False
    checkpoint: Optional[str] = None
    trace: bool = False

    # обучение
    train_steps: int = 2000
    batch_size: int = 4
    learning_rate: float = 1e-4
    base_channels: int = 16
    time_dim: int = 64
    holdout_fraction: float = 0.125

    # исследования
    sweep: Literal["a", "cutoff", "grid", "domain", "mask"] = "a"
    sweep_values: Optional[str] = None

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    _angles = validator("k0", "cutoff", "phase_max", pre=True, allow_reuse=True)(parse_angle)

    @validator("workers")
    def _workers(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("workers должно быть положительным")
        return value

    @validator("pixel_spacing_cm")
    def _spacing(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("pixel_spacing_cm должно быть положительным")
        return value

    @validator("phantom_count", "ellipse_count", "train_steps", "grid_size")
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("Значение должно быть положительным")
        return value

    @validator("k0", "cutoff")
    def _open_angle(cls, value: float) -> float:
        if not 0 < value < math.pi:
            raise ValueError("Значение должно лежать в (0, π)")
        return value

    @validator("a")
    def _a(cls, value: float) -> float:
        if not 0 <= value <= 1:
            raise ValueError("a должно лежать в [0, 1]")
        return value

    @validator("phase_axis")
    def _axis(cls, value: int) -> int:
        if value not in (0, 1):
            raise ValueError("phase_axis должно быть 0 или 1")
        return value

    @root_validator(skip_on_failure=True)
    def _profile(cls, values: dict) -> dict:
        profile = PROFILES[values["profile"]]
        for key, default in profile.items():
            if values.get(key) is None:
                values[key] = default
        if values.get("delta_k_min") is None:
            values["delta_k_min"] = 1.1 if values["simulator"] == "respiratory" else 2.5
        if values.get("delta_k_max") is None:
            values["delta_k_max"] = 1.2 if values["simulator"] == "respiratory" else 3.0
        if values["delta_k_min"] > values["delta_k_max"] or values["delta_k_min"] < 0:
            raise ValueError("Нужно 0 ≤ delta_k_min ≤ delta_k_max")
        if values["period_min"] > values["period_max"]:
            raise ValueError("Нужно period_min ≤ period_max")
        if not 0 <= values["intensity_lo"] <= values["intensity_hi"] <= 1:
            raise ValueError("Нужно 0 ≤ intensity_lo ≤ intensity_hi ≤ 1")
        return values

    def purify_config(self, **overrides) -> PurifyConfig:
        fields = dict(
            T=self.timesteps, a=self.a, cutoff=self.cutoff, grid_size=self.grid_size,
            phase_axis=self.phase_axis, seed=self.seed, balance=self.balance,
            guidance=self.guidance, omega_frequency=self.omega_frequency,
            omega_pixel=self.omega_pixel, reverse_variance=self.reverse_variance,
            clip_denoised=self.clip_denoised, oracle=self.oracle, checkpoint=self.checkpoint,
        )
        fields.update(overrides)
        return PurifyConfig(**fields)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            steps=self.train_steps, batch_size=self.batch_size,
            learning_rate=self.learning_rate, base_channels=self.base_channels,
            time_dim=self.time_dim, holdout_fraction=self.holdout_fraction,
            seed=self.seed,
        )

    def sweep_list(self) -> List[str]:
        raw = self.sweep_values or SWEEP_DEFAULTS[self.sweep]
        return [item.strip() for item in raw.split(",") if item.strip()]
