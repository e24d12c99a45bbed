"""Exception types shared across the package."""


class FormulaError(ValueError):
    """Malformed formula text or ill-formed operator bounds.

    ``position`` is the character offset into the source text when known.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class TraceTooShortError(ValueError):
    """The trace does not cover t + horizon(formula)."""


class ConfigError(ValueError):
    """Invalid problem configuration; ``path`` is a JSON pointer."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path or '/'}: {message}" if path else message)


class SolveError(RuntimeError):
    """Numerical failure or internal inconsistency inside the MILP solver."""
