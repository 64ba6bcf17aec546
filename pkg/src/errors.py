"""
Exception hierarchy for the splitting lab
"""
from typing import Optional


class SplittingLabError(Exception):
    """Base class for every error raised by the library"""


class NonZeroRemainderError(SplittingLabError):
    """Exact division left a remainder; an upstream recurrence produced a wrong polynomial"""


class ParityViolationError(SplittingLabError):
    """A declared parity, degree or valuation does not hold for a computed coefficient"""


class RecurrenceError(SplittingLabError):
    """Preconditions of one step of the formal-solution recurrence failed"""


class InsufficientOrderError(SplittingLabError):
    """A series is too short for the requested computation"""

    def __init__(self, message: str, required_order: Optional[int] = None):
        if required_order is not None:
            message = f"{message} (need order >= {required_order})"
        super().__init__(message)
        self.required_order = required_order


class DomainError(SplittingLabError):
    """Argument outside the domain of an operation"""


class ManifoldError(SplittingLabError):
    """Invariant-manifold construction or evaluation failed"""


class PrecisionGuardError(SplittingLabError):
    """Working precision is too low to resolve the splitting at this epsilon"""

    def __init__(self, epsilon: str, required_bits: int, available_bits: int):
        super().__init__(
            f"epsilon={epsilon} needs {required_bits} bits, configured {available_bits}"
        )
        self.epsilon = epsilon
        self.required_bits = required_bits
        self.available_bits = available_bits


class ConfigError(SplittingLabError):
    """Invalid run or precision configuration"""


class ArtifactError(SplittingLabError):
    """An emitted artifact does not conform to its schema"""
