from pathlib import Path
from typing import Any, Dict, List, Tuple

from base.log import get_logger
from base.report import write_json, write_tsv
from core.errors import ConfigError
from core.metrics import summarize, total_score
from schema.config import PurifyConfig, RunConfig
from schema.report import SweepReport, SweepRow
from server.common import run_pool, summary
from server.purify import MiddleLayerPurify


logger = get_logger("sweep")

MASK_ARMS = {
    "full": {},
    "none": {"guidance": "none"},
    "no_omega": {"omega_frequency": False, "omega_pixel": False},
    "omega_frequency": {"omega_pixel": False},
    "omega_pixel": {"omega_frequency": False},
}


def overrides_for(sweep: str, value: str, image_size: int) -> Dict[str, Any]:
    """Изменения PurifyConfig для одного значения исследуемой оси."""
    if sweep == "a":
        return {"a": float(value)}
    if sweep == "cutoff":
        return {"cutoff": value}
    if sweep == "grid":
        return {"grid_size": min(int(value), image_size)}
    if sweep == "domain":
        return {"balance": value}
    if sweep == "mask":
        if value not in MASK_ARMS:
            raise ConfigError(f"Неизвестный вариант маски '{value}', допустимы: {', '.join(MASK_ARMS)}")
        return MASK_ARMS[value]
    raise ConfigError(f"Неизвестная ось исследования '{sweep}'")


class MiddleLayerSweep:
    """
    Промежуточный слой исследований: параметр a, частота среза, размер
    клетки маски, абляции доменов и масок.

    Все варианты конфигурации проверяются до начала вычислений. Каждый
    вариант очищает весь корпус манифеста и даёт одну строку отчёта.
    """

    def __init__(self, purifier: MiddleLayerPurify) -> None:
        self.purifier = purifier

    def variants(self, config: RunConfig, base: PurifyConfig,
                 image_size: int) -> List[Tuple[str, PurifyConfig]]:
        variants = []
        for value in config.sweep_list():
            try:
                fields = {**base.dict(), **overrides_for(config.sweep, value, image_size)}
                variants.append((value, PurifyConfig(**fields)))
            except ConfigError:
                raise
            except Exception as e:
                raise ConfigError(f"Недопустимое значение '{value}' для {config.sweep}: {e}") from e
        if not variants:
            raise ConfigError("Список значений исследования пуст")
        return variants

    def run(self, config: RunConfig, out_dir: Path) -> Dict[str, Any]:
        if not config.manifest:
            raise ConfigError("Для исследования нужен manifest")
        jobs = self.purifier.jobs(config)
        if not jobs:
            raise ConfigError("Манифест пуст")
        schedule, factory = self.purifier.denoiser(config)
        base = self.purifier.purify_config(config, schedule)
        variants = self.variants(config, base, config.image_size)

        rows, items = [], []
        for value, purify_config in variants:
            logger.info(f"Исследование {config.sweep}={value}")
            results = run_pool(
                lambda job: self.purifier.purify_one(job, purify_config, schedule, factory),
                jobs, config.workers,
            )
            scored = [r["item"].purified for r in results if r["status_code"] == 200]
            failures = [r for r in results if r["status_code"] != 200]
            for r in results:
                r.pop("image", None)
                r.pop("trace", None)
                r.pop("item", None)
                r["name"] = f"{config.sweep}={value}/{r['name']}"
            items.extend(results)
            if not scored:
                continue
            mean = summarize(scored)
            rows.append(SweepRow(value=value, psnr=mean.psnr, ssim=mean.ssim, gmsd=mean.gmsd,
                                 total=total_score(mean), failures=len(failures)))

        report = SweepReport(sweep=config.sweep, rows=rows)
        write_json(out_dir / "sweep.json", report)
        write_tsv(out_dir / "sweep.tsv", [config.sweep, "psnr", "ssim", "gmsd", "total", "failures"],
                  [(r.value, r.psnr, r.ssim, r.gmsd, r.total, r.failures) for r in rows])
        return summary(items, report=report)
