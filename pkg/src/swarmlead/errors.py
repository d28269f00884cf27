"""Exception hierarchy shared by every swarmlead module."""


class SwarmLeadError(Exception):
    """Base class for all errors raised by swarmlead."""


class DataError(SwarmLeadError):
    """Input data is unusable (malformed, too short, inconsistent)."""


class InsufficientDataError(DataError):
    pass


class AlignmentError(DataError):
    pass


class WindowRangeError(DataError, IndexError):
    pass


class SchemaError(DataError):
    pass


class TrajectoryParseError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(SwarmLeadError):
    """A run/method configuration is invalid."""
