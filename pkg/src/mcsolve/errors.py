"""Exception hierarchy shared by every mcsolve module."""


class MCSolveError(Exception):
    """Base class for all errors raised by mcsolve."""


class ResolutionError(MCSolveError, ValueError):
    """Grid sizes that the discretisation cannot use (too small, wrong parity)."""


class GeometryError(MCSolveError, ValueError):
    """Invalid domain parameters or a mismatch between geometries."""


class OutOfDomainError(MCSolveError, ValueError):
    """A query point lies outside the closed domain."""


class CompatibilityError(MCSolveError):
    """Boundary data that cannot admit a solution (e.g. nonzero net flux)."""

    def __init__(self, message, reason=None, value=None):
        super().__init__(message)
        self.reason = reason
        self.value = value


class DivergenceError(MCSolveError):
    """Newton iteration broke down; carries the step-residual history."""

    def __init__(self, message, history=(), field=None):
        super().__init__(message)
        self.history = list(history)
        self.field = field


class ContinuationError(MCSolveError):
    """Continuation failed before reaching lambda = 1."""

    def __init__(self, message, last_lambda=None, solution=None):
        super().__init__(message)
        self.last_lambda = last_lambda
        self.solution = solution


class ConfigError(MCSolveError, ValueError):
    """Malformed or semantically invalid run configuration."""

    def __init__(self, message, path=None):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
