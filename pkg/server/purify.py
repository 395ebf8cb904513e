from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from base.checkpoint import load_checkpoint
from base.image import list_images, read_image, suffix_for, write_image
from base.log import get_logger
from base.manifest import load_manifest, resolve
from base.report import write_json, write_tsv
from core.diffusion import Denoiser, NoiseSchedule, OracleDenoiser
from core.errors import ConfigError
from core.metrics import evaluate_pair, summarize
from core.purify import purify
from schema.config import PurifyConfig, RunConfig
from schema.report import PurifyItem, PurifyReport
from server.common import build_schedule, failure, image_rng, run_pool, success, summary
from setting import setting


logger = get_logger("purify")

DenoiserFactory = Callable[[np.ndarray], Denoiser]


@dataclass(frozen=True)
class PurifyJob:
    index: int
    name: str
    source: Path
    reference: Optional[Path] = None
    target: Optional[Path] = None


def find_by_stem(directory: Path, stem: str) -> Optional[Path]:
    for path in list_images(directory):
        if path.stem == stem:
            return path
    return None


class MiddleLayerPurify:
    """
    Промежуточный слой очистки изображений.

    Каждое изображение очищается независимо, со своим генератором,
    полученным из (seed, номер изображения). Ошибка на одном изображении
    не останавливает обработку остальных.
    """

    def jobs(self, config: RunConfig) -> List[PurifyJob]:
        """
        Список заданий из манифеста или каталога input_dir.

        Для манифеста эталоном и целью оракула служит чистое изображение;
        для каталога целью оракула служит файл из oracle_target_dir с тем же
        именем, а без него само входное изображение.

        Raises:
            ConfigError: не задан источник изображений
        """
        target_dir = Path(config.oracle_target_dir) if config.oracle_target_dir else None
        if config.manifest:
            manifest = load_manifest(config.manifest)
            jobs = []
            for index, entry in enumerate(manifest.entries):
                source = resolve(config.manifest, entry.corrupted_path)
                clean = resolve(config.manifest, entry.clean_path)
                target = find_by_stem(target_dir, source.stem) if target_dir else clean
                jobs.append(PurifyJob(index, source.stem, source, clean, target))
            return jobs
        if config.input_dir:
            return [
                PurifyJob(index, path.stem, path, None,
                          find_by_stem(target_dir, path.stem) if target_dir else path)
                for index, path in enumerate(list_images(config.input_dir))
            ]
        raise ConfigError("Нужен manifest или input_dir")

    def denoiser(self, config: RunConfig) -> Tuple[NoiseSchedule, DenoiserFactory]:
        """
        Расписание и фабрика предсказателя шума.

        С контрольной точкой расписание берётся из неё; одна сеть
        разделяется всеми потоками только на чтение.
        """
        if config.oracle:
            schedule = build_schedule(config)
            return schedule, lambda target: OracleDenoiser(target, schedule)
        if config.checkpoint:
            toy = load_checkpoint(config.checkpoint)
            if toy.schedule.T != config.timesteps:
                logger.warning(
                    f"Расписание берётся из контрольной точки: T={toy.schedule.T} "
                    f"вместо {config.timesteps}"
                )
            return toy.schedule, lambda target: toy
        raise ConfigError("Нужна контрольная точка (checkpoint) или oracle = true")

    def purify_config(self, config: RunConfig, schedule: NoiseSchedule,
                      **overrides) -> PurifyConfig:
        try:
            return config.purify_config(T=schedule.T, **overrides)
        except ValidationError as e:
            raise ConfigError(f"Недопустимые параметры очистки: {e}") from e

    def purify_one(self, job: PurifyJob, purify_config: PurifyConfig,
                   schedule: NoiseSchedule, factory: DenoiserFactory,
                   trace: bool = False) -> Dict[str, Any]:
        """
        Очищает одно изображение.

        Args:
            job (PurifyJob): Задание
            purify_config (PurifyConfig): Параметры очистки
            schedule (NoiseSchedule): Расписание шума
            factory (DenoiserFactory): Фабрика предсказателя по цели оракула
            trace (bool): Собирать ли трассу

        Returns:
            dict: Результат со статусом; при успехе изображение, трасса и
                метрики относительно эталона (если он есть)
        """
        try:
            corrupted = read_image(job.source)
            reference = read_image(job.reference) if job.reference else None
            target = corrupted
            if purify_config.oracle:
                if job.target is None:
                    raise FileNotFoundError(f"Нет цели оракула для {job.name}")
                target = read_image(job.target)
            output, steps = purify(
                corrupted, purify_config, schedule, factory(target),
                reference=reference, rng=image_rng(purify_config.seed, job.index), trace=trace,
            )
            item = None
            if reference is not None:
                item = PurifyItem(
                    name=job.name,
                    corrupted=evaluate_pair(corrupted, reference, job.name),
                    purified=evaluate_pair(output, reference, job.name),
                )
            return success(job.name, image=output, trace=steps, item=item)
        except Exception as e:
            logger.error(f"Ошибка очистки {job.name}: {e}")
            return failure(job.name, e)

    def run(self, config: RunConfig, out_dir: Path) -> Dict[str, Any]:
        jobs = self.jobs(config)
        schedule, factory = self.denoiser(config)
        purify_config = self.purify_config(config, schedule)
        suffix = suffix_for(config.image_format or setting.IMAGE_FORMAT)

        def process(job: PurifyJob) -> Dict[str, Any]:
            result = self.purify_one(job, purify_config, schedule, factory, config.trace)
            if result["status_code"] != 200:
                return result
            write_image(out_dir / "purified" / f"{job.name}{suffix}", result.pop("image"))
            steps = result.pop("trace")
            if config.trace:
                trace_path = out_dir / "traces" / f"{job.name}.tsv"
                trace_path.parent.mkdir(parents=True, exist_ok=True)
                trace_path.write_text(steps.to_tsv(), encoding="utf-8")
            return result

        items = run_pool(process, jobs, config.workers)
        scored = [item.pop("item") for item in items if item.get("item") is not None]
        if scored:
            self.write_report(out_dir, scored, items)
        logger.info(f"Очищено изображений: {sum(i['status_code'] == 200 for i in items)} из {len(items)}")
        return summary(items)

    def write_report(self, out_dir: Path, scored: List[PurifyItem],
                     items: List[Dict[str, Any]]) -> None:
        report = PurifyReport(
            images=scored,
            corrupted_mean=summarize([s.corrupted for s in scored]),
            purified_mean=summarize([s.purified for s in scored]),
            errors=[f"{i['name']}: {i['description']}" for i in items if i["status_code"] != 200],
        )
        write_json(out_dir / "purify_report.json", report)
        write_tsv(
            out_dir / "purify_report.tsv",
            ["name", "psnr_corrupted", "psnr_purified", "psnr_gain",
             "ssim_corrupted", "ssim_purified", "gmsd_corrupted", "gmsd_purified"],
            [(s.name, s.corrupted.psnr, s.purified.psnr, s.psnr_gain, s.corrupted.ssim,
              s.purified.ssim, s.corrupted.gmsd, s.purified.gmsd) for s in scored],
        )
