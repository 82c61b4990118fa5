"""Exception types shared across the package."""


class GeocoherenceError(Exception):
    """Base class for all errors raised by this package."""


class TraceParseError(GeocoherenceError):
    """A trace row could not be parsed.

    Carries the 1-based line number and the offending field so callers
    can point at the exact problem.
    """

    def __init__(self, line_no: int, field: str, message: str):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}, field '{field}': {message}")


class ConfigError(GeocoherenceError):
    """An invalid configuration value."""


class TrainingError(GeocoherenceError):
    """Model training could not proceed (e.g. empty training matrix)."""


class ThreatOverflowError(GeocoherenceError):
    """PIN-space size exceeds the representable floating-point range."""
