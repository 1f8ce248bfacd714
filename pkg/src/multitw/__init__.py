"""Multicritical generalizations of the Tracy-Widom law.

Exact differential-polynomial algebra for the Lenard hierarchy, spectral
collocation for the scaled string equations, the Airy-kernel Fredholm
determinant, and a finite-N orthogonal-polynomial engine.
"""
from .errors import (
    CrossCheckFailed,
    MultiTWError,
    SolverError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = ["__version__", "MultiTWError", "ValidationError", "SolverError", "CrossCheckFailed"]
