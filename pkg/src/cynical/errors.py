"""Exception types shared across the package."""


class CynicalError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CynicalError):
    """Malformed or unreadable input (bad encoding, bad stats file, missing path)."""


class NothingSelectableError(CynicalError):
    """No candidate sentence contains any kept vocabulary word."""


class StaleBreakdownError(CynicalError):
    """A score breakdown was applied to a state that changed since scoring."""
