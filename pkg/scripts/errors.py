"""
Workbench Error Types

Every failure the workbench reports on purpose derives from WorkbenchError.
The `code` attribute doubles as the process exit code of the CLI:

- 1: input could not be parsed
- 2: a precondition of the requested operation does not hold
- 3: a brute-force enumeration would exceed the configured bound
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""

    code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParseError(WorkbenchError):
    """Malformed CLI flag, JSON document, rational, interval or word."""

    code = 1


class PreconditionError(WorkbenchError):
    """An operation was called outside its domain."""

    code = 2


class ScalarError(PreconditionError):
    """Mismatched q between scalars or division by a non-unit."""


class ConfigError(PreconditionError):
    """Invalid configuration file, profile or environment value."""


class BoundExceededError(WorkbenchError):
    """Raised instead of starting an enumeration that is too large."""

    code = 3

    def __init__(self, what: str, requested: int, bound: int):
        super().__init__(f"{what}: requested size {requested} exceeds bound {bound}")
        self.requested = requested
        self.bound = bound
