"""Exception hierarchy shared by all modules."""


class QMCGError(Exception):
    """Base class for library errors."""


class DomainError(QMCGError, ValueError):
    """Input outside the supported domain (genus, level, working region...)."""


class PrecisionError(QMCGError, ArithmeticError):
    """Numerical evaluation did not reach its tolerance."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class DegeneratePointError(DomainError):
    """A normalizing quantity is numerically zero."""


class ConstructionError(QMCGError, RuntimeError):
    """A representation failed a structural self-check (convention mismatch)."""
