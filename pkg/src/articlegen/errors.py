"""Exception taxonomy shared by the library and the CLI.

Exit-code mapping (see cli.main): UsageError -> 1, DataError -> 2,
ProviderError -> 3.
"""

from __future__ import annotations


class ArticleGenError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ArticleGenError):
    """Bad command-line usage or invalid parameter combination."""


class DataError(ArticleGenError):
    """Malformed or inconsistent input data (corpus, qrels, embeddings, ...)."""


class ProviderError(ArticleGenError):
    """A remote summarization/embedding provider failed or misbehaved."""


class StageError(ArticleGenError):
    """Wraps a failure with pipeline-stage and query attribution."""

    def __init__(self, stage: str, query_id: str, cause: BaseException):
        self.stage = stage
        self.query_id = query_id
        self.cause = cause
        super().__init__(f"stage={stage} query={query_id}: {cause}")


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code contract."""
    if isinstance(exc, StageError):
        return exit_code_for(exc.cause)
    if isinstance(exc, UsageError):
        return 1
    if isinstance(exc, ProviderError):
        return 3
    if isinstance(exc, DataError):
        return 2
    return 2
