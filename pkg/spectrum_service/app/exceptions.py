"""
Error hierarchy for the spectrum service.

Every error carries the CLI exit code it maps to and a human readable
detail, in the same way request handlers raise
HTTPException(status_code, detail).
"""
from typing import Optional


class SpectrumError(Exception):
    exit_code = 2

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __reduce__(self):
        # Subclasses take extra constructor arguments; rebuild from state
        return _restore, (type(self), self.detail, self.__dict__)


def _restore(cls, detail, state):
    error = cls.__new__(cls)
    SpectrumError.__init__(error, detail)
    error.__dict__.update(state)
    return error


class ConfigurationError(SpectrumError):
    exit_code = 1


class KernelValidationError(ConfigurationError):
    pass


class PoleHitError(SpectrumError):
    def __init__(self, z: complex, pole: float):
        super().__init__(
            f"Evaluation point {z} is within pole tolerance of {-pole}"
        )
        self.z = z
        self.pole = pole


class BracketFailureError(SpectrumError):
    def __init__(self, detail: str, bracket: tuple):
        super().__init__(detail)
        self.bracket = bracket


class RootRefinementError(SpectrumError):
    pass


class PhaseJumpError(SpectrumError):
    pass


class WindingQualityError(SpectrumError):
    def __init__(self, detail: str, quality: float):
        super().__init__(detail)
        self.quality = quality


class GapConditionExhaustedError(SpectrumError):
    pass


class RoucheViolationError(SpectrumError):
    def __init__(self, detail: str, worst_margin: float):
        super().__init__(detail)
        self.worst_margin = worst_margin


class PairNotFoundError(SpectrumError):
    pass


class StepSizeUnderflowError(SpectrumError):
    def __init__(self, detail: str, time: float):
        super().__init__(detail)
        self.time = time


class ClaimFailureError(SpectrumError):
    exit_code = 3
