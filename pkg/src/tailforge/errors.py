class TailforgeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TailforgeError, ValueError):
    """An argument lies outside the domain of the functional (G <= 0, c <= 0, t < 0)."""


class CapacityError(TailforgeError):
    """A product space or candidate set exceeds its configured cap."""


class ShapeError(TailforgeError, ValueError):
    """Tables or arrays that must share a space do not."""


class PreconditionError(TailforgeError):
    """A documented precondition does not hold.

    ``point`` and ``coordinate`` locate the offending entry when the failure is
    pointwise.
    """

    def __init__(self, message, point=None, coordinate=None):
        super().__init__(message)
        self.point = point
        self.coordinate = coordinate


class ConfigurationError(TailforgeError, ValueError):
    pass


class NumericError(TailforgeError, ArithmeticError):
    """Eigensolver failure or a numerically impossible result.

    ``seed_tag`` identifies the matrix sample so it can be replayed.
    """

    def __init__(self, message, seed_tag=None):
        super().__init__(message if seed_tag is None else f"{message} (seed_tag={seed_tag})")
        self.seed_tag = seed_tag


class CheckFailure(TailforgeError):
    """An inequality check failed; ``details`` carries the violating values."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or []
