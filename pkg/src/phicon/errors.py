"""Exception hierarchy shared across the toolkit."""


class PhiconError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(PhiconError):
    """A corpus, lexicon, or synonym file could not be parsed."""

    def __init__(self, message, source=None, line=None):
        loc = ""
        if source is not None:
            loc += f"{source}:"
        if line is not None:
            loc += f"{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.source = source
        self.line = line


class BioViolationError(PhiconError):
    """An operation required BIO-valid input and did not get it."""


class LexiconError(PhiconError):
    """Lexicon loading, generation, or resolution failed."""


class ExhaustionError(LexiconError):
    """The generator cannot produce the requested number of distinct values."""


class ModelFormatError(PhiconError):
    """A saved tagger model file is unreadable, truncated, or wrong version."""
