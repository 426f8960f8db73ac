"""Exception types shared across the engine, simulator and CLI."""


class SemipinchError(Exception):
    """Base class for every error raised by this package."""


class NotTracked(SemipinchError):
    """A hand pose was queried while the tracker reported it as lost."""


class ClockError(SemipinchError):
    """Timestamps went backwards or repeated."""


class ConfigError(SemipinchError, ValueError):
    """A configuration value violates one of its bounds."""


class ParseError(SemipinchError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VersionError(SemipinchError):
    """A trace or scenario file declares an unsupported schema version."""


class SchemaError(SemipinchError):
    """A CSV file does not carry the expected column layout."""


class IntegrityError(SemipinchError):
    """An artifact's embedded config digest does not match."""


class IncompleteTrial(SemipinchError):
    """An event log lacks TrialStarted or TrialEnded."""


class EmptyBlock(SemipinchError):
    """A block of trials has no valid trial to aggregate."""
