from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional

import numpy as np
from pydantic import ValidationError

from core.diffusion import NoiseSchedule, desk_schedule, make_schedule
from core.errors import (CheckpointError, ConfigError, ImageFormatError, ManifestError,
                         ShapeMismatchError)
from schema.config import RunConfig
from setting import setting


def derive_seed(seed: int, index: int) -> int:
    """Независимое зерно для изображения с номером index."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def image_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def build_schedule(config: RunConfig) -> NoiseSchedule:
    if config.beta_start is not None and config.beta_end is not None:
        return make_schedule(config.timesteps, config.beta_start, config.beta_end)
    if config.beta_start is not None or config.beta_end is not None:
        raise ConfigError("beta_start и beta_end задаются только вместе")
    return desk_schedule(config.timesteps)


def run_pool(func: Callable[[Any], Dict[str, Any]], items: Iterable,
             workers: Optional[int]) -> List[Dict[str, Any]]:
    """Обрабатывает элементы пулом потоков; порядок результатов совпадает со входом."""
    items = list(items)
    workers = workers or setting.WORKERS
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def success(name: str, **extra) -> Dict[str, Any]:
    return {"status_code": 200, "title": "Успешно", "description": None, "name": name, **extra}


def failure(name: str, error: Exception) -> Dict[str, Any]:
    if isinstance(error, (FileNotFoundError, ManifestError)):
        code = 404
    elif isinstance(error, ShapeMismatchError):
        code = 422
    elif isinstance(error, (ConfigError, ValidationError, ImageFormatError, CheckpointError)):
        code = 400
    else:
        code = 500
    return {"status_code": code, "title": "Ошибка", "description": str(error), "name": name}


def summary(items: List[Dict[str, Any]], **extra) -> Dict[str, Any]:
    failed = [item for item in items if item["status_code"] != 200]
    if failed:
        return {
            "status_code": 500,
            "title": "Ошибка",
            "description": f"Не обработано {len(failed)} из {len(items)}",
            "items": items,
            **extra,
        }
    return {"status_code": 200, "title": "Успешно", "description": None, "items": items, **extra}
