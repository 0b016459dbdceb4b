"""Exception hierarchy shared by every layer of the package."""


class NearspanError(Exception):
    """Base class for all package errors."""


class InputError(NearspanError):
    """Malformed graph input or an out-of-range argument."""


class ConfigError(NearspanError):
    """A construction parameter violates its admissible range."""

    def __init__(self, constraint, message=None):
        self.constraint = constraint
        super().__init__(message or f"configuration constraint violated: {constraint}")


class ProtocolError(NearspanError):
    """A distributed program broke its own contract (always a bug)."""

    def __init__(self, message, phase=None):
        self.phase = phase
        if phase is not None:
            message = f"phase {phase}: {message}"
        super().__init__(message)


class BandwidthViolation(ProtocolError):
    """More than one message on an edge direction in a round, or an oversized message."""


class DeterminismError(ProtocolError):
    """Two replays of the same run produced different traces."""
