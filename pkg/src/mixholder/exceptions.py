"""Exception types raised by mixholder."""


class GuardError(ValueError):
    """A size guard was exceeded (brute-force grids, resource ceilings)."""


class InsufficientSamplesError(ValueError):
    """The sample stream ran out before the requested number of Kaczmarz steps."""


class LedgerViolation(AssertionError):
    """The noise recursion bound was violated during a traced fit."""
