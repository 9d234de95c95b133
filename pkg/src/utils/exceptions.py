"""
Exception hierarchy.

All errors derive from OnticError, itself a ValueError, so callers can keep
catching ValueError for anything caused by bad input.
"""


class OnticError(ValueError):
    """Base class for every error raised by the toolkit."""


class InvalidBehavior(OnticError):
    """A probability table fails normalization or range checks."""


class WrongScenario(OnticError):
    """An operation was called on a scenario it does not support."""


class WeightSum(OnticError):
    """Mixture weights do not sum to one."""


class ScenarioMismatch(OnticError):
    """Objects that must share a scenario do not."""


class ScenarioTooLarge(OnticError):
    """An enumeration would exceed the desk-scale guard."""


class TooManyOrders(OnticError):
    """Too many parties to precompute one decomposition per order."""


class NotNoSignaling(OnticError):
    """A behavior fails the (one-way) no-signaling precondition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DuplicateQuery(OnticError):
    """A party was queried twice in the same round."""


class PolicyUnavailable(OnticError):
    """Forced resolution was requested where violations cannot arise."""


class UnknownSelector(OnticError):
    """A statistics selector does not name a logged variable."""


class InvalidConfig(OnticError):
    """An experiment or agent configuration is inconsistent."""


class FileFormatError(OnticError):
    """A file could not be parsed; carries the position when known."""

    def __init__(self, message, path=None, line=None, column=None):
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}:{column or 0}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line
        self.column = column
