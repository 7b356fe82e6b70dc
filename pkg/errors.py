"""
Error taxonomy for cordic-kit.
Numeric non-convergence and saturation are reported on results, never raised.
"""


class CordicError(Exception):
    """Base class for every error raised by cordic-kit."""


class UsageError(CordicError, ValueError):
    """Caller asked for something the API does not support (bad format, arity, name)."""


class RangeError(CordicError, ValueError):
    """A value lies outside a Q-format or outside a convergence region."""


class DomainError(CordicError, ValueError):
    """A function is undefined (or the variant cannot converge) for the argument."""


class CordicZeroDivisionError(CordicError, ZeroDivisionError):
    pass


class PgmFormatError(CordicError):
    """Malformed PGM input; `offset` is the byte position where parsing stopped."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class UnsupportedFormatError(PgmFormatError):
    pass
