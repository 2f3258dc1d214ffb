"""Query-specific article generation and evaluation toolkit.

Retrieves passages for a broad query, clusters them into subtopics,
summarizes each cluster into an article section with source provenance,
and evaluates every stage (and the composed system) against benchmarks
derived from structured articles.
"""

__version__ = "0.1.0"

from .errors import ArticleGenError, DataError, ProviderError, StageError, UsageError

__all__ = [
    "ArticleGenError",
    "DataError",
    "ProviderError",
    "StageError",
    "UsageError",
    "__version__",
]
