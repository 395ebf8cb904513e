from pathlib import Path
from typing import Any, Dict, List, Tuple

from base.image import list_images, read_image
from base.log import get_logger
from base.report import write_json, write_tsv
from core.errors import ConfigError
from core.metrics import evaluate_pair, mann_whitney_u, summarize, total_score
from schema.config import RunConfig
from schema.report import EvaluationReport, MetricReport
from server.common import failure, run_pool, success, summary


logger = get_logger("evaluate")

METRICS = ("psnr", "ssim", "gmsd")


class MiddleLayerEvaluate:
    """
    Промежуточный слой оценки качества.

    Сопоставляет файлы кандидата и эталона по имени без расширения,
    считает PSNR/SSIM/GMSD по парам и, если задан второй кандидат,
    U-критерий Манна–Уитни по каждой метрике.
    """

    def pairs(self, candidate_dir: Path, reference_dir: Path) -> Tuple[List[Tuple[str, Path, Path]], List[str]]:
        references = {path.stem: path for path in list_images(reference_dir)}
        candidates = {path.stem: path for path in list_images(candidate_dir)}
        pairs = [(stem, candidates[stem], references[stem])
                 for stem in sorted(candidates) if stem in references]
        unmatched = sorted(
            [f"{name}: нет в {reference_dir}" for name in candidates if name not in references]
            + [f"{name}: нет в {candidate_dir}" for name in references if name not in candidates]
        )
        return pairs, unmatched

    def score(self, pair: Tuple[str, Path, Path]) -> Dict[str, Any]:
        name, candidate, reference = pair
        try:
            report = evaluate_pair(read_image(candidate), read_image(reference), name)
            return success(name, report=report)
        except Exception as e:
            logger.error(f"Ошибка оценки пары {name}: {e}")
            return failure(name, e)

    def score_dir(self, candidate_dir: Path, reference_dir: Path,
                  workers) -> Tuple[List[MetricReport], List[Dict[str, Any]]]:
        pairs, unmatched = self.pairs(candidate_dir, reference_dir)
        items = run_pool(self.score, pairs, workers)
        for description in unmatched:
            logger.error(f"Нет пары для файла {description}")
            items.append({"status_code": 404, "title": "Ошибка",
                          "description": description, "name": description.split(":")[0]})
        reports = [item.pop("report") for item in items if item["status_code"] == 200]
        return reports, items

    def run(self, config: RunConfig, out_dir: Path) -> Dict[str, Any]:
        """
        Оценивает каталог кандидата относительно эталона.

        Args:
            config (RunConfig): candidate_dir, reference_dir, baseline_dir (необязательно)
            out_dir (Path): Каталог для evaluation.json / evaluation.tsv

        Returns:
            dict: Сводка с отчётом
        """
        if not config.candidate_dir or not config.reference_dir:
            raise ConfigError("Нужны candidate_dir и reference_dir")

        reports, items = self.score_dir(Path(config.candidate_dir), Path(config.reference_dir),
                                        config.workers)
        report = EvaluationReport(
            images=reports,
            mean=summarize(reports) if reports else None,
            errors=[f"{i['name']}: {i['description']}" for i in items if i["status_code"] != 200],
        )
        if report.mean is not None:
            report.total = total_score(report.mean)

        if config.baseline_dir:
            baseline, baseline_items = self.score_dir(Path(config.baseline_dir),
                                                      Path(config.reference_dir), config.workers)
            items.extend(baseline_items)
            report.errors.extend(f"baseline {i['name']}: {i['description']}"
                                 for i in baseline_items if i["status_code"] != 200)
            if reports and baseline:
                report.baseline_mean = summarize(baseline, name="baseline")
                report.u_tests = {
                    metric: mann_whitney_u([getattr(r, metric) for r in reports],
                                           [getattr(r, metric) for r in baseline])
                    for metric in METRICS
                }

        self.write(out_dir, report)
        return summary(items, report=report)

    def write(self, out_dir: Path, report: EvaluationReport) -> None:
        write_json(out_dir / "evaluation.json", report)
        rows = [(r.name, r.psnr, r.ssim, r.gmsd) for r in report.images]
        if report.mean is not None:
            rows.append(("mean", report.mean.psnr, report.mean.ssim, report.mean.gmsd))
        write_tsv(out_dir / "evaluation.tsv", ["name", "psnr", "ssim", "gmsd"], rows)
        if report.u_tests:
            write_tsv(
                out_dir / "u_tests.tsv",
                ["metric", "u_statistic", "p_value", "n1", "n2", "exact"],
                [(metric, u.u_statistic, u.p_value, u.n1, u.n2, u.exact)
                 for metric, u in sorted(report.u_tests.items())],
            )
