"""Shared exception types."""


class PrsError(Exception):
    """Base class for errors raised by this package."""


class BudgetError(PrsError):
    """An enumeration or certification budget was exceeded.

    Raised instead of silently degrading: the caller asked for an exact
    answer that would require more work than the configured cap allows.
    """


class RoundCapError(PrsError):
    """A sampler hit its round cap before reaching a valid assignment.

    Carries the partial run statistics in ``stats``.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats
