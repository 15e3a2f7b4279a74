"""Exception hierarchy shared by every module."""

from __future__ import annotations


class EconomyError(Exception):
    """Base class for all errors raised by firmsoup."""

    kind = "error"


class ValidationError(EconomyError):
    kind = "validation"


class ConfigError(ValidationError):
    """Malformed or inconsistent configuration document."""

    kind = "config"


class DomainError(EconomyError, ValueError):
    """A zero base raised to a negative power, or a similar undefined input."""

    kind = "domain"


class SolverError(EconomyError):
    kind = "solver"


class SingularSystemError(SolverError):
    kind = "singular"


class InfeasibleEconomyError(SolverError):
    kind = "infeasible"


class DegenerateDenominatorError(SolverError):
    kind = "degenerate"


class OutOfRangeError(SolverError):
    kind = "out-of-range"


class StepSizeError(SolverError):
    kind = "step-size"


class NonConvergenceError(SolverError):
    kind = "non-convergence"

    def __init__(self, message: str, dispersion: float, trace=None):
        super().__init__(message)
        self.dispersion = dispersion
        self.trace = trace


class OracleFailure(EconomyError):
    kind = "oracle"
