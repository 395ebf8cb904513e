class PfadError(Exception):
    """Базовая ошибка инструментария."""


class ConfigError(PfadError):
    pass


class ShapeMismatchError(PfadError):
    pass


class StepRangeError(PfadError):
    pass


class EmptyCorpusError(PfadError):
    pass


class DivergenceError(PfadError):
    pass


class CheckpointError(PfadError):
    pass


class ImageFormatError(PfadError):
    pass


class ManifestError(PfadError):
    pass


class NonFiniteLatentError(PfadError):
    """Латент перестал быть конечным на шаге ``step`` обратного процесса."""

    def __init__(self, step: int) -> None:
        super().__init__(f"Нечисловое значение латента на шаге t={step}")
        self.step = step
