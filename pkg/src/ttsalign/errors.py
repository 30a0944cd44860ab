"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: data/format problems exit with 3,
numerical failures with 4.
"""


class TTSAlignError(Exception):
    """Base class for every error raised by this package."""


class DataError(TTSAlignError, ValueError):
    """Input data is malformed, mis-shaped or violates a precondition."""


class WavError(DataError):
    pass


class MalformedWavError(WavError):
    pass


class UnsupportedEncodingError(WavError):
    pass


class EmptyAudioError(WavError):
    pass


class FeatureFileError(DataError):
    pass


class ConfigError(DataError):
    pass


class ShapeError(DataError):
    pass


class NoValidAlignmentError(DataError):
    """Raised when T < N, so no monotonic alignment covers every token."""


class NumericalError(TTSAlignError, ArithmeticError):
    pass


class SaturationError(NumericalError):
    """A hard-selected cell has zero soft probability, so the loss is +inf."""

    def __init__(self, message: str, value: float = float("inf")):
        super().__init__(message)
        self.value = value


class DivergenceError(NumericalError):
    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step
