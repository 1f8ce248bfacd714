"""Exception types shared across the package.

The CLI maps these onto exit codes: validation errors exit 2, solver
non-convergence exits 3 and failed cross-checks exit 4.
"""


class MultiTWError(Exception):
    exit_code = 1


class ValidationError(MultiTWError, ValueError):
    exit_code = 2


class SolverError(MultiTWError, RuntimeError):
    exit_code = 3


class CrossCheckFailed(MultiTWError):
    exit_code = 4


# diffpoly / lenard
class NotExact(MultiTWError, ArithmeticError):
    """The polynomial is not a total derivative of any differential polynomial."""


class JetTooShort(ValidationError):
    """A jet does not carry enough derivatives for the polynomial evaluated on it."""


class IndexOutOfRange(ValidationError, IndexError):
    pass


# airy oracle
class NodeCountTooSmall(ValidationError):
    pass


# painleve / backlund
class NoConvergence(SolverError):
    pass


class PoleDetected(SolverError):
    """The background solution is not real and pole-free on the requested grid."""


class MatchingWindowViolated(SolverError):
    pass


class DomainExceeded(ValidationError):
    pass


class NegativeRadicand(SolverError):
    """``L_k[u] - x/2`` changes sign, so the Schrodinger factor is undefined somewhere."""

    def __init__(self, msg, interval=None):
        super().__init__(msg)
        self.interval = interval


class PoleOfW(SolverError):
    pass


# finite N
class PrecisionExhausted(SolverError):
    pass


class NonIntegrableWeight(ValidationError):
    pass


class NotConverged(SolverError):
    pass
