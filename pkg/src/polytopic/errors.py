"""Exception types shared across the toolkit."""


class PolytopicError(Exception):
    """Base class for all toolkit errors."""


class AlignmentError(PolytopicError):
    """Parallel corpus files disagree on document count."""


class EmptyCorpusError(PolytopicError):
    """A corpus file contained no documents."""


class ParseError(PolytopicError):
    """A data file could not be parsed."""

    def __init__(self, message: str, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        where = ""
        if path is not None:
            where = f" ({path}"
            if line_number is not None:
                where += f", line {line_number}"
            where += ")"
        super().__init__(message + where)


class TopicFileError(PolytopicError):
    """A topic file violated the expected format."""


class DegenerateTopicError(PolytopicError):
    """A topic was too small for the requested metric."""


class UndefinedCorrelationError(PolytopicError):
    """Pearson correlation is undefined (zero variance)."""


class CapacityError(PolytopicError):
    """A requested model would exceed the configured memory bound."""


class ConfigError(PolytopicError):
    """Invalid configuration value."""


class FoldError(PolytopicError):
    """Too few languages to build cross-validation folds."""


class UsageError(PolytopicError):
    """Invalid command-line usage; maps to exit status 2."""
