"""Exception types shared across flagkit."""

from __future__ import annotations


class FlagkitError(Exception):
    """Base class for all flagkit errors."""


class DimensionMismatch(FlagkitError, ValueError):
    """Operands live in different ambient spaces or have incompatible shapes."""


class BudgetExceeded(FlagkitError):
    """An enumeration or search would exceed the configured point budget."""


class SpecError(FlagkitError, ValueError):
    """A standard-extension datum violates its invariants.

    ``violations`` holds the structured entries of the validation report.
    """

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotAdapted(FlagkitError, ValueError):
    """A basis is not adapted to the subspaces it must split."""


class InvariantViolation(FlagkitError):
    """An internal consistency check failed; indicates a bug, not bad input."""
