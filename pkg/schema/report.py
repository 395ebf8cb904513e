from typing import Dict, List, Optional

from pydantic import BaseModel, validator


REPORT_VERSION = "1"


class MetricReport(BaseModel):
    name: str = ""
    psnr: float
    ssim: float
    gmsd: float

    @validator("ssim")
    def _ssim(cls, value: float) -> float:
        if not -1.0 - 1e-9 <= value <= 1.0 + 1e-9:
            raise ValueError("SSIM вне [-1, 1]")
        return value

    @validator("gmsd")
    def _gmsd(cls, value: float) -> float:
        if value < 0:
            raise ValueError("GMSD не может быть отрицательным")
        return value


class UTestResult(BaseModel):
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    exact: bool = False

    @validator("p_value")
    def _p(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError("p_value вне [0, 1]")
        return value


class EvaluationReport(BaseModel):
    report_version: str = REPORT_VERSION
    images: List[MetricReport] = []
    mean: Optional[MetricReport] = None
    total: Optional[float] = None
    baseline_mean: Optional[MetricReport] = None
    u_tests: Dict[str, UTestResult] = {}
    errors: List[str] = []


class PurifyItem(BaseModel):
    name: str
    corrupted: MetricReport
    purified: MetricReport

    @property
    def psnr_gain(self) -> float:
        return self.purified.psnr - self.corrupted.psnr


class PurifyReport(BaseModel):
    report_version: str = REPORT_VERSION
    images: List[PurifyItem] = []
    corrupted_mean: Optional[MetricReport] = None
    purified_mean: Optional[MetricReport] = None
    errors: List[str] = []


class SweepRow(BaseModel):
    value: str
    psnr: float
    ssim: float
    gmsd: float
    total: float
    failures: int = 0


class SweepReport(BaseModel):
    report_version: str = REPORT_VERSION
    sweep: str
    rows: List[SweepRow] = []


class TrainReport(BaseModel):
    report_version: str = REPORT_VERSION
    steps: int
    corpus_size: int
    initial_loss: float
    final_loss: float
    parameter_count: int
