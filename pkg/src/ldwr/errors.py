"""Exception types shared across the engine."""


class LdwrError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(LdwrError):
    """A parameter or request is inconsistent with the data it is applied to."""


class DegenerateClassError(LdwrError):
    """A class ended up with zero descriptors where at least one is required."""


class DegenerateStatisticsError(LdwrError):
    """Too few values to compute a mean/standard-deviation pair."""


class DatasetFormatError(LdwrError):
    """A descriptor file failed structural validation.

    ``offset`` is the byte position at which parsing failed, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EpisodeEvaluationError(LdwrError):
    """An episode could not be evaluated; carries the episode index."""

    def __init__(self, episode_index: int, cause: Exception):
        super().__init__(f"episode {episode_index}: {cause}")
        self.episode_index = episode_index
        self.cause = cause
