from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import ValidationError

from core.errors import ConfigError
from schema.config import RunConfig


def parse_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Разбирает плоский файл "ключ = значение" с комментариями "#".

    Args:
        path (str | Path): Путь к файлу

    Returns:
        dict: Значения как строки

    Raises:
        ConfigError: файла нет, строка без "=" или ключ повторяется
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Файл конфигурации {path} не найден")

    values: Dict[str, str] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: ожидается 'ключ = значение'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{number}: пустой ключ")
        if key in values:
            raise ConfigError(f"{path}:{number}: ключ '{key}' задан повторно")
        values[key] = value
    return values


def parse_overrides(tokens: List[str]) -> Dict[str, str]:
    """Разбирает флаги вида "--key value" и "--key=value"."""
    values: Dict[str, str] = {}
    position = 0
    while position < len(tokens):
        token = tokens[position]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigError(f"Ожидается флаг '--ключ', получено '{token}'")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            position += 1
        else:
            if position + 1 >= len(tokens):
                raise ConfigError(f"Для флага '{token}' нет значения")
            value = tokens[position + 1]
            position += 2
        values[key.replace("-", "_")] = value
    return values


def load_run_config(path: Optional[Union[str, Path]] = None,
                    overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Собирает RunConfig: файл, поверх него флаги.

    Raises:
        ConfigError: неизвестный ключ или недопустимое значение; в
            сообщении названы ключи
    """
    values = parse_config_file(path) if path else {}
    values.update(overrides or {})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}"
            for error in e.errors()
        )
        raise ConfigError(f"Недопустимая конфигурация: {problems}") from e
