"""Exception types shared across the package."""


class UnstableMziError(Exception):
    """Base class for all package errors."""


class DomainError(UnstableMziError, ValueError):
    """An argument lies outside the physical or mathematical domain."""


class ConfigurationError(UnstableMziError, ValueError):
    """A solver or run configuration violates its preconditions."""


class RegimeError(UnstableMziError, RuntimeError):
    """The requested run lies outside the regime where the analytic
    plane-wave model is expected to hold, so a numerical comparison
    against it would be meaningless."""


class BoundaryContamination(UnstableMziError, RuntimeError):
    """Wavepacket amplitude reached the periodic grid boundary, which
    would contaminate decay and phase measurements."""


class UndefinedResultError(UnstableMziError, ArithmeticError):
    """The requested quantity is undefined for these inputs
    (e.g. visibility of an all-zero fringe scan)."""
