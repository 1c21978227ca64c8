"""Exception hierarchy. Every data-level failure derives from PolitenessError."""


class PolitenessError(Exception):
    """Base class for data errors raised by this package."""


class CorpusError(PolitenessError):
    """Malformed corpus or annotation file, or an invalid split request."""


class LexiconError(PolitenessError):
    pass


class FeatureError(PolitenessError):
    pass


class ModelError(PolitenessError):
    """Training failures, prediction mismatches and unreadable model files."""
