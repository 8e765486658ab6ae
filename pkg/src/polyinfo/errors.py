"""Exception types.

Every error carries a short machine-readable ``code`` (e.g. ``"SUM_NOT_ONE"``)
so callers such as the command line can react without parsing messages.
"""


class PolyinfoError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class DistributionError(PolyinfoError, ValueError):
    """Invalid distribution, variable set, partition or parameter."""


class NotConvergedError(PolyinfoError, ArithmeticError):
    """An iterative numerical routine failed to reach its tolerance."""


class SearchError(PolyinfoError, RuntimeError):
    """A combinatorial search ran out of budget or candidates."""
