"""Exception types shared across the package."""


class CapacityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CapacityError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(CapacityError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class BracketError(ConvergenceError):
    """A root or threshold search found no sign change on its bracket."""


class CombinatorialBlowupError(DomainError):
    """An exact combinatorial search would exceed its work cap."""
