import math
from typing import Tuple

from pydantic import BaseModel, validator, root_validator


DEFAULT_K0 = math.pi / 10
# 1 см на отсчёт: Δ_k совпадает с наклоном фазового рампа, k_y в радианах на отсчёт
DEFAULT_PIXEL_SPACING_CM = 1.0


class RigidMotionParams(BaseModel):
    delta_k: float
    rotation_deg: float = 0.0
    k0: float = DEFAULT_K0
    pixel_spacing_cm: float = DEFAULT_PIXEL_SPACING_CM
    seed: int = 0

    class Config:
        allow_mutation = False

    @validator("delta_k")
    def _delta_k(cls, value: float) -> float:
        if value < 0:
            raise ValueError("delta_k должно быть неотрицательным")
        return value

    @validator("rotation_deg")
    def _rotation(cls, value: float) -> float:
        if abs(value) > 90:
            raise ValueError("|rotation_deg| не должен превышать 90")
        return value

    @validator("k0")
    def _k0(cls, value: float) -> float:
        if not 0 < value < math.pi:
            raise ValueError("k0 должно лежать в (0, π)")
        return value

    @validator("pixel_spacing_cm")
    def _spacing(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("pixel_spacing_cm должно быть положительным")
        return value

    @property
    def shift_px(self) -> float:
        return self.delta_k / self.pixel_spacing_cm


class RespiratoryParams(BaseModel):
    delta_k: float
    period_m: float
    phase_n: float = 0.0
    k0: float = DEFAULT_K0
    pixel_spacing_cm: float = DEFAULT_PIXEL_SPACING_CM
    seed: int = 0

    class Config:
        allow_mutation = False

    @validator("delta_k")
    def _delta_k(cls, value: float) -> float:
        if value < 0:
            raise ValueError("delta_k должно быть неотрицательным")
        return value

    @validator("period_m")
    def _period(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("period_m должно быть положительным")
        return value

    @validator("phase_n")
    def _phase(cls, value: float) -> float:
        if not 0 <= value < 2 * math.pi:
            raise ValueError("phase_n должно лежать в [0, 2π)")
        return value

    @validator("k0")
    def _k0(cls, value: float) -> float:
        if not 0 < value < math.pi:
            raise ValueError("k0 должно лежать в (0, π)")
        return value

    @validator("pixel_spacing_cm")
    def _spacing(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("pixel_spacing_cm должно быть положительным")
        return value

    @property
    def amplitude_px(self) -> float:
        return self.delta_k / self.pixel_spacing_cm


class PhantomSpec(BaseModel):
    size: int = 64
    ellipse_count: int = 6
    intensity_range: Tuple[float, float] = (0.2, 1.0)
    seed: int = 0

    class Config:
        allow_mutation = False

    @validator("size")
    def _size(cls, value: int) -> int:
        if value < 16:
            raise ValueError("Размер фантома должен быть не меньше 16")
        return value

    @validator("ellipse_count")
    def _count(cls, value: int) -> int:
        if value < 1:
            raise ValueError("Нужен хотя бы один эллипс")
        return value

    @root_validator(skip_on_failure=True)
    def _intensity(cls, values: dict) -> dict:
        lo, hi = values["intensity_range"]
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("intensity_range должен лежать внутри [0, 1] и lo ≤ hi")
        return values
