"""Exception types shared across the package.

Input problems derive from ``ValueError``; resource limits derive from
``RuntimeError`` so the CLI can map them to different exit codes.
"""


class ModschurError(Exception):
    """Base class for all package errors."""


class InputError(ModschurError, ValueError):
    """Malformed or inconsistent input."""


class CompositeModulus(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class FieldMismatch(InputError):
    pass


class TooManyColumns(InputError):
    pass


class InvalidWitness(InputError):
    pass


class NotCoprime(InputError):
    pass


class EmptyBase(InputError):
    pass


class BudgetExceeded(ModschurError, RuntimeError):
    """An enumeration would exceed its configured element budget."""


class SearchTimeout(ModschurError, RuntimeError):
    """A search ran out of time or nodes before reaching an answer."""

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class ScanExhausted(ModschurError, RuntimeError):
    """The regular-width scan found no admissible width (should not happen)."""
