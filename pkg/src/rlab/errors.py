"""Exception types shared across the package.

Each class maps to one CLI exit code (see :mod:`rlab.cli`).
"""


class UsageError(ValueError):
    """Invalid arguments or inconsistent inputs."""


class CapacityError(RuntimeError):
    """A resource or iteration budget was exceeded.

    ``partial`` carries whatever was computed before the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientDataError(ValueError):
    """Too few usable data points for a fit or an aggregate."""

    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = profile


class UndefinedCellError(UsageError):
    """A point needed for a word lies outside every partition cell."""
