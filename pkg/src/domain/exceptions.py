"""Custom exceptions for the perspective-shift toolkit.

This module defines domain-specific exceptions for clear error handling
and messaging throughout the application. Every exception belongs to one
of three categories, each mapped to a process exit code by the CLI.
"""


class TdkpsError(Exception):
    """Base exception for all toolkit errors."""

    exit_code = 1


# Usage / configuration errors
class UsageError(TdkpsError):
    """Raised when the caller supplied invalid arguments or configuration."""

    exit_code = 2


class ConfigError(UsageError):
    """Raised when a configuration file cannot be parsed or validated."""

    pass


class InvalidArgumentError(UsageError):
    """Raised when an operation's preconditions on its arguments are violated."""

    pass


class UnknownMethodError(UsageError):
    """Raised when a test method name is not recognized."""

    def __init__(self, method: str, valid: list[str]):
        """Initialize with the offending name and the valid set.

        Args:
            method: Method name that was requested
            valid: Method names accepted in this context
        """
        super().__init__(
            f"Unknown method '{method}'. Valid methods: {', '.join(sorted(valid))}"
        )
        self.method = method
        self.valid = valid


# Data / format errors
class DataError(TdkpsError):
    """Base exception for input data problems."""

    exit_code = 3


class TensorFormatError(DataError):
    """Raised when a tensor file has a bad magic header, version or dtype flag."""

    pass


class PayloadLengthError(DataError):
    """Raised when a tensor file payload is truncated or oversized."""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"Tensor payload has {actual} bytes, expected {expected} bytes"
        )
        self.expected = expected
        self.actual = actual


class TensorValidationError(DataError):
    """Raised when tensor values or manifest metadata violate invariants."""

    pass


class IndexBoundsError(DataError):
    """Raised when an agent or time index is out of range."""

    def __init__(self, name: str, index: int, size: int):
        """Initialize with the index description.

        Args:
            name: Name of the indexed axis ("agent", "time", ...)
            index: Requested index
            size: Length of the axis
        """
        super().__init__(f"{name} index {index} out of range [0, {size})")
        self.name = name
        self.index = index
        self.size = size


class DimensionMismatchError(DataError):
    """Raised when matrix shapes are incompatible."""

    pass


class MissingGroundTruthError(DataError):
    """Raised when an oracle method is requested without simulation ground truth."""

    pass


class TensorStoreError(DataError):
    """Raised when reading or writing a tensor file fails at the OS level."""

    pass


# Numerical failures
class NumericalError(TdkpsError):
    """Base exception for numerical failures."""

    exit_code = 4


class DegenerateInputError(NumericalError):
    """Raised when a distance matrix has no positive spectrum to embed."""

    pass


class DegenerateGroupError(NumericalError):
    """Raised when a group has fewer than two agents."""

    pass


class ZeroVarianceError(NumericalError):
    """Raised when a sample has zero distance variance or is entirely tied."""

    pass


class SingularCovarianceError(NumericalError):
    """Raised when a covariance matrix cannot be inverted."""

    pass
