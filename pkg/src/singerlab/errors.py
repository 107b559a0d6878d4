"""Exception types shared across the package."""


class SingerlabError(Exception):
    pass


class WindowError(SingerlabError, ValueError):
    """A degree lies outside the window an object is defined on."""


class WindowTruncation(SingerlabError):
    """A result lands beyond the window of a truncated module, so it is unknown."""


class InsufficientWindow(SingerlabError):
    """A module window is too small to compute the requested range."""

    def __init__(self, message: str, horizon: int | None = None):
        super().__init__(message)
        self.horizon = horizon


class NotStable(SingerlabError):
    pass


class DescriptionError(SingerlabError, ValueError):
    """A module description file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(SingerlabError, ValueError):
    """An action table breaks the Adem relations; ``report`` lists the violations."""

    def __init__(self, message: str, report=None, prime: int | None = None):
        super().__init__(message)
        self.report = report or []
        self.prime = prime
