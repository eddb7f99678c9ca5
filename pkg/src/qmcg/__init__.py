"""Numerical laboratory for quantum mapping class group representations."""
from .errors import ConstructionError, DegeneratePointError, DomainError, PrecisionError, QMCGError

__version__ = "0.1.0"

__all__ = ["ConstructionError", "DegeneratePointError", "DomainError", "PrecisionError", "QMCGError", "__version__"]
