from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from base.checkpoint import save_checkpoint
from base.image import list_images, read_image
from base.log import get_logger
from base.manifest import load_manifest, resolve
from base.report import write_json
from core.errors import EmptyCorpusError
from core.phantom import generate_phantom
from core.train import train_toy_denoiser
from schema.config import RunConfig
from schema.motion import PhantomSpec
from schema.report import TrainReport
from server.common import build_schedule, derive_seed


logger = get_logger("train")

CHECKPOINT_NAME = "denoiser.ckpt"


class MiddleLayerTrain:
    """
    Промежуточный слой обучения предсказателя шума.

    Корпус берётся из чистых изображений манифеста, из input_dir или,
    если ни то ни другое не задано, из сгенерированных фантомов.
    """

    def corpus(self, config: RunConfig) -> List[np.ndarray]:
        if config.manifest:
            manifest = load_manifest(config.manifest)
            return [read_image(resolve(config.manifest, e.clean_path)) for e in manifest.entries]
        if config.input_dir:
            return [read_image(path) for path in list_images(config.input_dir)]
        return [
            generate_phantom(PhantomSpec(
                size=config.image_size,
                ellipse_count=config.ellipse_count,
                intensity_range=(config.intensity_lo, config.intensity_hi),
                seed=derive_seed(config.seed, index),
            ))
            for index in range(config.phantom_count)
        ]

    def run(self, config: RunConfig, out_dir: Path) -> Dict[str, Any]:
        """
        Обучает сеть и пишет контрольную точку.

        Args:
            config (RunConfig): Конфигурация команды
            out_dir (Path): Каталог результата

        Returns:
            dict: Результат с путём к контрольной точке и потерями

        Raises:
            EmptyCorpusError: корпус пуст
            DivergenceError: обучение разошлось
        """
        corpus = self.corpus(config)
        if not corpus:
            raise EmptyCorpusError("Корпус для обучения пуст")
        schedule = build_schedule(config)
        train_config = config.train_config()

        logger.info(f"Обучение: {len(corpus)} изображений, {train_config.steps} шагов, T={schedule.T}")
        outcome = train_toy_denoiser(corpus, schedule, train_config)
        path = save_checkpoint(out_dir / CHECKPOINT_NAME, outcome.denoiser)

        report = TrainReport(
            steps=train_config.steps,
            corpus_size=len(corpus),
            initial_loss=outcome.initial_loss,
            final_loss=outcome.final_loss,
            parameter_count=outcome.denoiser.parameter_count(),
        )
        write_json(out_dir / "train_report.json", report)
        logger.info(
            f"Потеря на отложенной выборке: {outcome.final_loss:.6f} "
            f"(до обучения {outcome.initial_loss:.6f})"
        )
        return {
            "status_code": 200,
            "title": "Успешно",
            "description": None,
            "items": [],
            "checkpoint": str(path),
            "report": report,
        }
