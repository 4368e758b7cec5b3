"""Exception hierarchy shared by every module."""


class IpsLabError(Exception):
    """Base class for errors raised by the lab."""


class InputDomainError(IpsLabError, ValueError):
    """A string, symbol or parameter lies outside the domain of an operation."""


class UnsupportedSpecError(IpsLabError, ValueError):
    """An exact oracle was requested for a language spec it cannot handle."""


class ConfigError(IpsLabError, ValueError):
    """A scenario, suite or protocol configuration is malformed."""


class ArityError(ConfigError):
    """The number of provers does not match what the protocol expects."""


class BudgetError(IpsLabError, RuntimeError):
    """A resource budget would be (or was) exceeded."""
