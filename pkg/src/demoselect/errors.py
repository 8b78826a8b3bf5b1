"""Exception hierarchy shared by all demoselect modules."""


class DemoselectError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DemoselectError, ValueError):
    """An input violates a documented contract."""


class ClassCountError(ValidationError):
    """Two distributions or stores disagree on the number of classes."""


class AbsoluteContinuityError(ValidationError):
    """KL divergence is undefined: p carries mass where the reference has none."""


class ConfigError(DemoselectError):
    """A run configuration is incomplete or internally inconsistent."""


class FormatError(DemoselectError):
    """A data file does not conform to its schema.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class ProtocolError(DemoselectError):
    """A remote service replied with a malformed or inconsistent payload."""


class RequestError(DemoselectError):
    """A remote request failed after exhausting retries."""

    def __init__(self, message: str, status: int | None = None, body_excerpt: str = ""):
        self.status = status
        self.body_excerpt = body_excerpt[:200]
        detail = message
        if status is not None:
            detail += f" (status {status})"
        if self.body_excerpt:
            detail += f": {self.body_excerpt}"
        super().__init__(detail)


class RunAbortedError(DemoselectError):
    """A pipeline run failed mid-way; carries the completed trace prefix."""

    def __init__(self, message: str, partial_trace: tuple = (), cause: Exception | None = None):
        self.partial_trace = partial_trace
        self.cause = cause
        super().__init__(message)
