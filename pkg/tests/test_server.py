import logging

import numpy as np
import pytest

from base.log import ColorFormatter
from base.manifest import load_manifest, save_manifest
from base.report import write_tsv
from core.errors import ConfigError, ManifestError, ShapeMismatchError
from schema.config import RunConfig
from schema.manifest import DatasetManifest, ManifestEntry
from server.common import build_schedule, derive_seed, failure, run_pool, success, summary
from server.sweep import MASK_ARMS, overrides_for


def test_run_pool_keeps_order():
    assert run_pool(lambda x: {"value": x * x}, range(20), workers=4) == [
        {"value": x * x} for x in range(20)
    ]


def test_derived_seeds_are_distinct_and_stable():
    seeds = [derive_seed(7, i) for i in range(50)]
    assert len(set(seeds)) == 50
    assert seeds == [derive_seed(7, i) for i in range(50)]


@pytest.mark.parametrize("error, code", [
    (FileNotFoundError("x"), 404),
    (ManifestError("x"), 404),
    (ShapeMismatchError("x"), 422),
    (ConfigError("x"), 400),
    (RuntimeError("x"), 500),
])
def test_failure_codes(error, code):
    result = failure("img", error)
    assert result["status_code"] == code
    assert result["title"] == "Ошибка"
    assert result["name"] == "img"


def test_summary_status():
    assert summary([success("a"), success("b")])["status_code"] == 200
    failed = summary([success("a"), failure("b", RuntimeError("boom"))])
    assert failed["status_code"] == 500
    assert "1 из 2" in failed["description"]


def test_build_schedule():
    assert build_schedule(RunConfig(timesteps=40)).beta_end == pytest.approx(0.5)
    explicit = build_schedule(RunConfig(timesteps=40, beta_start=1e-4, beta_end=0.02))
    assert explicit.beta_end == 0.02
    with pytest.raises(ConfigError):
        build_schedule(RunConfig(beta_start=1e-4))


def test_sweep_overrides():
    assert overrides_for("grid", "64", 32) == {"grid_size": 32}
    assert overrides_for("a", "0.3", 64) == {"a": 0.3}
    assert overrides_for("mask", "none", 64) == MASK_ARMS["none"]
    with pytest.raises(ConfigError):
        overrides_for("mask", "half", 64)


def test_manifest_checks_files(tmp_path):
    entry = ManifestEntry(clean_path="clean/a.png", corrupted_path="corrupted/a.png",
                          simulator="rigid", params={"delta_k": 1.0}, seed=1)
    path = save_manifest(tmp_path / "manifest.json", DatasetManifest(entries=[entry]))
    with pytest.raises(ManifestError, match="clean/a.png"):
        load_manifest(path)
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "other.json")

    path.write_text('{"version": "9", "entries": []}', encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_tsv_formatting(tmp_path):
    path = write_tsv(tmp_path / "r.tsv", ["name", "psnr", "n"], [("a", np.float64(1.5).item(), 3)])
    assert path.read_text(encoding="utf-8") == "name\tpsnr\tn\na\t1.500000\t3\n"


def test_color_formatter_prefix():
    record = logging.LogRecord("pfad.test", logging.ERROR, __file__, 1, "сбой", None, None)
    assert ColorFormatter(use_colors=False).format(record) == "ERROR:    сбой"
    assert ColorFormatter(use_colors=True).format(record).endswith("сбой")
