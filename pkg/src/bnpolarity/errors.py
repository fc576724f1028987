"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class PolarityError(Exception):
    """Base class for every error raised by this package."""


class CorpusError(PolarityError, ValueError):
    """A corpus or stopword file could not be read or is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCorpusError(CorpusError):
    """The corpus file contains no records."""


class ConfigError(PolarityError, ValueError):
    """Invalid run configuration or command-line input."""


class TrainingError(PolarityError, ValueError):
    """Training or cross-validation cannot proceed on the given data."""


class ArtifactError(PolarityError):
    """A model artifact is unreadable or has an unsupported version."""
