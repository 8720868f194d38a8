from typing import Any, Dict, Optional


class TwinCurveError(Exception):
    """Base class for every error raised by the library."""

    exit_code: int = 1


class DomainError(TwinCurveError, ValueError):
    """An argument violates an operation's precondition."""

    exit_code = 2


class PrimalityError(DomainError):
    pass


class TwinError(DomainError):
    pass


class TwistError(DomainError):
    pass


class UnsupportedError(TwinCurveError):
    """Inputs are valid but fall outside every covered clause."""

    exit_code = 2


class UsageError(TwinCurveError):
    exit_code = 2


class OutputError(TwinCurveError):
    """A result file could not be written."""

    exit_code = 2


class RangeError(TwinCurveError, OverflowError):
    """Configured bit width or enumeration budget exceeded."""

    exit_code = 3


class ExhaustionError(TwinCurveError):
    exit_code = 3


class NumericError(TwinCurveError, ArithmeticError):
    """Numerical procedure failed to converge."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({details})"


class InternalInconsistencyError(TwinCurveError, RuntimeError):
    """An identity that must hold failed: an implementation bug, never a math outcome."""
