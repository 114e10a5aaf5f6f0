"""
Error hierarchy for the perceptron codec.

Every error derives from CodecError and from the builtin that best describes it,
so callers can catch either `CodecError` or e.g. `ValueError`.
"""
from typing import Optional


class CodecError(Exception):
    """Base class for all errors raised by the codec package."""


class DimensionMismatchError(CodecError, ValueError):
    """Two objects that must agree on a length do not."""

    def __init__(self, what: str, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected length {expected}, got {actual}")


class InvalidSymbolError(CodecError, ValueError):
    """A binary sequence contains a symbol outside {+1, -1}."""


class InvalidParameterError(CodecError, ValueError):
    """A numeric argument is outside its domain."""


class InstanceTooLargeError(CodecError, ValueError):
    """Exhaustive enumeration refused because N exceeds the cap."""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"N={n} exceeds the enumeration limit N<={limit}")


class NumericOverflowError(CodecError, ArithmeticError):
    """Closed-form channel integrals produced a non-finite value."""

    def __init__(self, w_minus, w_plus, iteration: Optional[int] = None):
        self.w_minus = w_minus
        self.w_plus = w_plus
        self.iteration = iteration
        where = f" at iteration {iteration}" if iteration is not None else ""
        super().__init__(f"non-finite channel integrals{where} (w_minus={w_minus}, w_plus={w_plus})")

    def at_iteration(self, iteration: int) -> "NumericOverflowError":
        return NumericOverflowError(self.w_minus, self.w_plus, iteration=iteration)


class ChannelDegeneracyError(CodecError, ArithmeticError):
    """The normalizer of a factor underflowed (i0 < 1e-300)."""

    def __init__(self, iteration: int, factor: int, i0: float):
        self.iteration = iteration
        self.factor = factor
        self.i0 = i0
        super().__init__(f"channel degeneracy at iteration {iteration}: i0={i0:.3e} for factor {factor}")


class ConfigError(CodecError, ValueError):
    """A configuration file or flag could not be interpreted."""


# ===== Container format =====

class ContainerError(CodecError, ValueError):
    """A compressed container is malformed."""


class BadMagicError(ContainerError):
    pass


class UnsupportedVersionError(ContainerError):
    pass


class TruncatedContainerError(ContainerError):
    """The stream ends before the header or payload is complete."""

    def __init__(self, expected_bits: int, actual_bits: int, part: str = "payload"):
        self.expected_bits = expected_bits
        self.actual_bits = actual_bits
        super().__init__(f"truncated {part}: expected {expected_bits} bits, got {actual_bits}")


class NonzeroPaddingError(ContainerError):
    pass


class TrailingDataError(ContainerError):
    pass


class ContainerIOError(CodecError, OSError):
    """Reading or writing a container file failed."""

    def __init__(self, path: str, position: int, reason: str):
        self.path = path
        self.position = position
        super().__init__(f"{path}: I/O failure at byte {position}: {reason}")
