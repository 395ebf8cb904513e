import logging
import sys

from setting import color, setting


LEVEL_COLORS = {
    logging.DEBUG: color.OKCYAN,
    logging.INFO: color.OKGREEN,
    logging.WARNING: color.WARNING,
    logging.ERROR: color.FAIL,
    logging.CRITICAL: color.FAIL + color.BOLD,
}


class ColorFormatter(logging.Formatter):
    """
    Форматтер консольного вывода.

    Печатает уровень в виде цветного префикса, выровненного по ширине
    ("ERROR:    ", "INFO:     "), затем сообщение.

    Attributes:
        use_colors (bool): Добавлять ли ANSI-коды цвета
    """

    def __init__(self, use_colors: bool = True) -> None:
        super().__init__("%(message)s")
        self.use_colors = use_colors

    def format(self, record: logging.LogRecord) -> str:
        prefix = f"{record.levelname}:".ljust(10)
        if self.use_colors:
            prefix = f"{LEVEL_COLORS.get(record.levelno, color.WHITE)}{prefix}{color.ENDC}"
        return prefix + super().format(record)


def get_logger(name: str) -> logging.Logger:
    """
    Возвращает логгер пакета с консольным обработчиком.

    Args:
        name (str): Имя модуля

    Returns:
        logging.Logger: Настроенный логгер
    """
    root = logging.getLogger("pfad")
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColorFormatter(use_colors=sys.stderr.isatty()))
        root.addHandler(handler)
        root.setLevel(setting.LOG_LEVEL.upper())
        root.propagate = False
    return root.getChild(name)
