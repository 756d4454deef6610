"""Exception hierarchy shared across the package."""


class LedaError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LedaError, ValueError):
    """Operands or parameter sets are inconsistent or invalid."""


class SingularError(LedaError, ArithmeticError):
    """A ring element has no multiplicative inverse (zero divisor)."""


class FormatError(LedaError, ValueError):
    """A serialized object (key, ciphertext, KAT file) is malformed."""


class KeyGenerationError(LedaError):
    """Key generation could not produce an invertible public-key block."""


class DecodingFailure(LedaError):
    """The decoder did not converge.

    ``reason`` is ``"max-iterations"`` or ``"stall"``; ``iterations`` is the
    number of iterations executed before giving up.
    """

    def __init__(self, reason, iterations, trace=None):
        super().__init__(f"decoding failure ({reason}) after {iterations} iterations")
        self.reason = reason
        self.iterations = iterations
        self.trace = trace or []
