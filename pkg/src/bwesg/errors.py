"""Exception hierarchy shared by all bwesg modules.

Every error raised on a contract violation derives from :class:`BwesgError`
so the command-line layer can turn any of them into a one-line diagnostic
and a non-zero exit code.
"""


class BwesgError(Exception):
    """Base class for all bwesg errors."""


class ParseError(BwesgError):
    """A line of an input file is malformed (wrong field count, bad token)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(BwesgError):
    """A file violates structural format rules (languages, duplicates, header)."""


class AlignmentError(BwesgError):
    """A document id is present in only one language."""


class ConfigurationError(BwesgError):
    """Invalid or inconsistent configuration, or empty required input."""


class EmptyDocumentError(BwesgError):
    """Both sides of a document pair are empty."""


class EmptySideError(BwesgError):
    """One side of a document pair is empty where the operation needs both."""


class UndefinedSimilarityError(BwesgError):
    """Cosine similarity requested for a zero-norm vector."""


class DomainError(BwesgError):
    """Input is outside the mathematical domain (e.g. not a distribution)."""


class UnknownWordError(BwesgError):
    """A queried word is not present in the vocabulary or embedding space."""


class EmptyContextError(BwesgError):
    """A context bag contains no in-vocabulary words."""


class PairingError(BwesgError):
    """Paired result vectors have mismatched lengths."""
