"""Exception types shared across the engine."""


class ExpertSearchError(Exception):
    """Base class for all engine errors."""


class RecordFormatError(ExpertSearchError):
    """A data file violates its line format. Carries path and line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class NotFoundError(ExpertSearchError):
    """Lookup of an unknown author, document or entity."""


class ConfigError(ExpertSearchError):
    """Invalid configuration key, value or combination."""


class StageError(ExpertSearchError):
    """A pipeline stage was invoked before its prerequisites ran."""

    def __init__(self, message, stage):
        super().__init__(message)
        self.stage = stage
