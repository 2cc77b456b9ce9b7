"""Exception types shared across the package."""


class AdigeLabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AdigeLabError, ValueError):
    """Raised when an operation receives a non-finite or malformed input."""


class NumericalError(AdigeLabError, ArithmeticError):
    """Raised when an inner solve fails to reach its residual tolerance.

    Carries the last residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CapabilityError(AdigeLabError, TypeError):
    """Raised when an operation needs a capability the objective lacks
    (typically a Hessian-vector product)."""


class DivergenceError(AdigeLabError, RuntimeError):
    """Raised when a simulated or iterated state blows up.

    ``time`` is the blow-up time (or iteration index for discrete runs) and
    ``partial`` holds whatever trajectory or iterate log was recorded before
    the guard tripped.
    """

    def __init__(self, message, time=None, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class NotFoundError(AdigeLabError, KeyError):
    """Raised on lookup of an unknown catalog problem id."""

    def __str__(self):
        return self.args[0] if self.args else "not found"


class InsufficientDataError(AdigeLabError, ValueError):
    """Raised when a fit or statistic has too few usable samples."""


class InputError(AdigeLabError, ValueError):
    """Raised on inconsistent diagnostic inputs (grid mismatch and similar)."""


class ConditionError(AdigeLabError, ValueError):
    """Raised when a parameter family condition is violated.

    ``condition`` names the violated inequality.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class CertificateRefusedError(ConditionError):
    """Raised when an angle certificate's admissibility inequality fails."""


class ConfigError(AdigeLabError, ValueError):
    """Raised on scenario config parse or validation failure.

    ``errors`` is a list of ``(line_number, message)`` pairs.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"line {n}: {m}" for n, m in self.errors)
        super().__init__(lines or "invalid config")
