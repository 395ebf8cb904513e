from typing import Any, Dict, List, Literal

from pydantic import BaseModel


MANIFEST_VERSION = "1"


class ManifestEntry(BaseModel):
    clean_path: str
    corrupted_path: str
    simulator: Literal["rigid", "respiratory"]
    params: Dict[str, Any]
    seed: int
    phase_axis: int = 0


class DatasetManifest(BaseModel):
    version: str = MANIFEST_VERSION
    entries: List[ManifestEntry] = []
