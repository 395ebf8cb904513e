from pathlib import Path
from typing import Union

from pydantic import ValidationError

from core.errors import ManifestError
from schema.manifest import MANIFEST_VERSION, DatasetManifest


def save_manifest(path: Union[str, Path], manifest: DatasetManifest) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.json(indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def resolve(manifest_path: Union[str, Path], relative: str) -> Path:
    """Пути в манифесте записаны относительно его каталога."""
    return Path(manifest_path).parent / relative


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """
    Читает манифест и проверяет, что все упомянутые файлы существуют.

    Args:
        path (str | Path): Путь к manifest.json

    Returns:
        DatasetManifest: Манифест

    Raises:
        ManifestError: файла нет, формат неверен или нет файлов изображений
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"Манифест {path} не найден")
    try:
        manifest = DatasetManifest.parse_file(path)
    except (ValidationError, ValueError) as e:
        raise ManifestError(f"Манифест {path} повреждён: {e}") from e
    if manifest.version != MANIFEST_VERSION:
        raise ManifestError(f"Версия манифеста {manifest.version} не поддерживается")

    missing = [
        relative
        for entry in manifest.entries
        for relative in (entry.clean_path, entry.corrupted_path)
        if not resolve(path, relative).is_file()
    ]
    if missing:
        raise ManifestError(f"В манифесте есть отсутствующие файлы: {', '.join(missing)}")
    return manifest
