"""Exception types raised across the package."""


class LewisqError(Exception):
    """Base class for all package errors."""


class RankDeficient(LewisqError, ValueError):
    pass


class SingularGram(LewisqError, ValueError):
    pass


class NoConvergence(LewisqError, RuntimeError):
    """An iterative routine ran out of budget.

    ``best`` holds the best iterate found, when the routine has one.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegeneratePlan(LewisqError, ValueError):
    pass


class TooLarge(LewisqError, ValueError):
    pass


class Degenerate(LewisqError, ValueError):
    pass


class InvalidCut(LewisqError, ValueError):
    pass


class NotStronglyConnected(LewisqError, ValueError):
    pass


class InvalidSpec(LewisqError, ValueError):
    pass


class DimensionMismatch(LewisqError, ValueError):
    pass


class ParseError(LewisqError, ValueError):
    """Malformed input file. ``line`` is 1-based, or None if not line-specific."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")
