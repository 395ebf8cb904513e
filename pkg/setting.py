import os

from pydantic import BaseSettings, validator


class Setting(BaseSettings):
    WORKERS: int = os.cpu_count() or 1
    LOG_LEVEL: str = "INFO"
    IMAGE_FORMAT: str = "png"

    class Config:
        env_prefix = "PFAD_"
        env_file = ".env"

    @validator("WORKERS")
    def _workers(cls, value: int) -> int:
        if value < 1:
            raise ValueError("PFAD_WORKERS должно быть положительным")
        return value

    @validator("IMAGE_FORMAT")
    def _image_format(cls, value: str) -> str:
        if value not in ("png", "raw"):
            raise ValueError("PFAD_IMAGE_FORMAT: допустимы png или raw")
        return value


# палитра консольного вывода, её использует base/log.py
class Color:
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    WHITE = '\033[97m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'
    UNDERLINE = '\033[4m'


setting = Setting()
color = Color()
