"""Exception hierarchy shared by every module.

Everything raised on bad input derives from :class:`ScoreQueryError`, which
the CLI maps to exit code 1 (validation failure).
"""


class ScoreQueryError(ValueError):
    """Base class for validation errors."""


class MalformedSpine(ScoreQueryError):
    """Missing ``**kern`` header or ``*-`` terminator."""


class MultiSpine(ScoreQueryError):
    """More than one spine found (tab-separated fields)."""


class BadToken(ScoreQueryError):
    """A data record matches none of the recognized forms."""

    def __init__(self, record: int, token: str):
        self.record = record
        self.token = token
        super().__init__(f"record {record}: unrecognized token {token!r}")


class OctaveOutOfRange(ScoreQueryError):
    pass


class ClassMismatch(ScoreQueryError):
    pass


class UnknownClass(ScoreQueryError):
    pass


class DuplicateDecision(ScoreQueryError):
    pass


class UnknownQueryId(ScoreQueryError):
    pass


class EmptyReference(ScoreQueryError):
    pass


class EmptyCorpus(ScoreQueryError):
    pass


class DomainError(ScoreQueryError):
    pass
