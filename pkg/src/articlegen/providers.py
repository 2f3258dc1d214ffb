"""Summarization and embedding providers.

The pipeline talks to summarizers through a tiny interface so the
neural model stays out of process: the native provider is extractive
(leading sentences), and the remote provider posts JSON to a local HTTP
endpoint. A remote embedder with the same shape can supply vectors for
summary texts. Provider failures surface as ProviderError so the CLI
can map them to a distinct exit code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import requests

from .errors import DataError, ProviderError

_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    """Split on ./!/? followed by whitespace. Deliberately simple: an
    abbreviation like "Dr." counts as a boundary, which is accepted
    coarseness rather than a bug."""
    return [part for part in _SENTENCE_RE.split(text.strip()) if part]


@runtime_checkable
class Summarizer(Protocol):
    tag: str
    abstractive: bool

    def summarize(self, text: str, max_sentences: int) -> str: ...


@dataclass(frozen=True)
class NativeSummarizer:
    """Extractive fallback: keep the first max_sentences sentences."""

    tag: str = "native-extractive"
    abstractive: bool = False

    def summarize(self, text: str, max_sentences: int) -> str:
        if max_sentences < 1:
            raise DataError(f"max_sentences must be >= 1, got {max_sentences}")
        sentences = split_sentences(text)
        return " ".join(sentences[:max_sentences])


@dataclass(frozen=True)
class RemoteSummarizer:
    """HTTP summarizer: POST {"text", "max_sentences"} -> {"summary"}."""

    endpoint: str
    timeout: float = 30.0
    tag: str = "remote-abstractive"
    abstractive: bool = True

    def summarize(self, text: str, max_sentences: int) -> str:
        if max_sentences < 1:
            raise DataError(f"max_sentences must be >= 1, got {max_sentences}")
        try:
            resp = requests.post(
                self.endpoint,
                json={"text": text, "max_sentences": max_sentences},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"summarizer at {self.endpoint}: {exc}") from exc
        except ValueError as exc:
            raise ProviderError(f"summarizer at {self.endpoint}: non-JSON response") from exc
        summary = payload.get("summary") if isinstance(payload, dict) else None
        if not isinstance(summary, str) or not summary.strip():
            raise ProviderError(
                f"summarizer at {self.endpoint}: response missing non-empty 'summary'"
            )
        return summary


@dataclass(frozen=True)
class RemoteEmbedder:
    """HTTP embedder: POST {"texts": [...]} -> {"vectors": [[...]]}."""

    endpoint: str
    timeout: float = 30.0
    tag: str = "remote-embedder"

    def embed(self, texts: list[str]) -> list[list[float]]:
        if not texts:
            return []
        try:
            resp = requests.post(self.endpoint, json={"texts": texts}, timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"embedder at {self.endpoint}: {exc}") from exc
        except ValueError as exc:
            raise ProviderError(f"embedder at {self.endpoint}: non-JSON response") from exc
        vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError(
                f"embedder at {self.endpoint}: expected {len(texts)} vectors"
            )
        dims = {len(v) for v in vectors}
        if len(dims) != 1:
            raise ProviderError(f"embedder at {self.endpoint}: inconsistent vector dimensions")
        return [[float(x) for x in vec] for vec in vectors]
