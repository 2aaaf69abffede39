"""Exception types shared across the library."""


class LandauError(Exception):
    """Base class for all library errors."""


class DomainError(LandauError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(LandauError):
    """Request exceeds a configured exact-computation limit."""


class ResourceError(LandauError):
    """Request exceeds configured memory/segment budgets."""


class RangeExhaustedError(LandauError):
    """A scan ran out of primes before its stop condition held.

    Carries the final state so the caller can checkpoint and resume.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NumericalError(LandauError):
    """An iteration failed to converge or a tie margin was too small."""


class IntegrityError(LandauError):
    """A cache or checkpoint failed validation."""


class HypothesisError(LandauError):
    """A lemma's hypothesis does not hold, so its conclusion cannot be used."""


class UsageError(LandauError):
    """Invalid call pattern (e.g. non-consecutive superchampions)."""
