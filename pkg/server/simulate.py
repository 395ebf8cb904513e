from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import ValidationError

from base.image import list_images, read_image, suffix_for, write_image
from base.log import get_logger
from base.manifest import resolve, save_manifest
from core.errors import ConfigError
from core.motion import MotionParams, draw_respiratory_params, draw_rigid_params, simulate
from core.phantom import generate_phantom
from schema.config import RunConfig
from schema.manifest import DatasetManifest, ManifestEntry
from schema.motion import PhantomSpec, RespiratoryParams, RigidMotionParams
from server.common import derive_seed, failure, run_pool, success, summary
from setting import setting


logger = get_logger("simulate")


def quantize(image: np.ndarray, image_format: str) -> np.ndarray:
    """Значения, которые вернёт чтение записанного файла."""
    if image_format == "raw":
        return np.clip(image, 0.0, 1.0).astype(np.float32).astype(np.float64)
    return np.round(np.clip(image, 0.0, 1.0) * 65535.0).astype(np.uint16) / 65535.0


def draw_params(config: RunConfig, seed: int) -> MotionParams:
    if config.simulator == "respiratory":
        return draw_respiratory_params(
            seed,
            delta_range=(config.delta_k_min, config.delta_k_max),
            period_range=(config.period_min, config.period_max),
            phase_range=(0.0, config.phase_max),
            k0=config.k0,
            pixel_spacing_cm=config.pixel_spacing_cm,
        )
    return draw_rigid_params(
        seed,
        delta_range=(config.delta_k_min, config.delta_k_max),
        rotation_range=(-config.rotation_max_deg, config.rotation_max_deg),
        k0=config.k0,
        pixel_spacing_cm=config.pixel_spacing_cm,
    )


class MiddleLayerSimulate:
    """
    Промежуточный слой для построения корпуса с артефактами движения.

    Для каждого чистого изображения выбирает параметры движения из
    собственного зерна, пишет чистое и испорченное изображения и собирает
    манифест. Манифест пишется один раз, после обработки всех изображений.
    """

    def sources(self, config: RunConfig) -> List[Tuple[str, np.ndarray]]:
        """
        Чистые изображения: из input_dir или сгенерированные фантомы.

        Args:
            config (RunConfig): Конфигурация команды

        Returns:
            list: Пары (имя без расширения, изображение)
        """
        if config.input_dir:
            return [(path.stem, read_image(path)) for path in list_images(config.input_dir)]
        return [
            (f"phantom_{index:04d}", generate_phantom(PhantomSpec(
                size=config.image_size,
                ellipse_count=config.ellipse_count,
                intensity_range=(config.intensity_lo, config.intensity_hi),
                seed=derive_seed(config.seed, index),
            )))
            for index in range(config.phantom_count)
        ]

    def simulate_one(self, config: RunConfig, out_dir: Path, index: int,
                     name: str, clean: np.ndarray) -> Dict[str, Any]:
        image_format = config.image_format or setting.IMAGE_FORMAT
        filename = name + suffix_for(image_format)
        try:
            seed = derive_seed(config.seed, index)
            params = draw_params(config, seed)
            clean = quantize(clean, image_format)
            corrupted = simulate(clean, params, config.phase_axis)

            write_image(out_dir / "clean" / filename, clean)
            write_image(out_dir / "corrupted" / filename, corrupted)
            entry = ManifestEntry(
                clean_path=f"clean/{filename}",
                corrupted_path=f"corrupted/{filename}",
                simulator=config.simulator,
                params=params.dict(),
                seed=seed,
                phase_axis=config.phase_axis,
            )
            return success(filename, entry=entry)
        except Exception as e:
            logger.error(f"Ошибка моделирования для {filename}: {e}")
            return failure(filename, e)

    def run(self, config: RunConfig, out_dir: Path) -> Dict[str, Any]:
        """
        Строит корпус.

        Args:
            config (RunConfig): Конфигурация команды
            out_dir (Path): Каталог результата

        Returns:
            dict: Сводка с манифестом и результатами по изображениям

        Raises:
            ConfigError: параметры симулятора недопустимы
        """
        try:
            draw_params(config, config.seed)
        except ValidationError as e:
            raise ConfigError(f"Недопустимые параметры симулятора: {e}") from e

        sources = self.sources(config)
        items = run_pool(
            lambda job: self.simulate_one(config, out_dir, job[0], *job[1]),
            enumerate(sources),
            config.workers,
        )
        manifest = DatasetManifest(
            entries=[item.pop("entry") for item in items if item["status_code"] == 200]
        )
        save_manifest(out_dir / "manifest.json", manifest)
        logger.info(f"Смоделировано изображений: {len(manifest.entries)} из {len(items)}")
        return summary(items, manifest=manifest)

    def regenerate(self, manifest_path: Path, entry: ManifestEntry) -> np.ndarray:
        """Повторно моделирует испорченное изображение по записи манифеста."""
        clean = read_image(resolve(manifest_path, entry.clean_path))
        params_type = RespiratoryParams if entry.simulator == "respiratory" else RigidMotionParams
        return simulate(clean, params_type(**entry.params), entry.phase_axis)
