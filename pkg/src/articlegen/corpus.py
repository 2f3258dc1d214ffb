"""Paragraph corpus and query ingestion, plus the shared tokenizer.

One tokenizer serves both lexical retrieval and n-gram evaluation:
lowercase, split on maximal runs of non-alphanumeric characters, no
stemming, no stopword removal. Keeping a single rule makes every score
in the toolkit bit-reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import DataError
from .fileio import dump_jsonl, iter_jsonl, write_text_atomic

# \w minus underscore, unicode-aware
_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase `text` and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def normalize_text(text: str) -> str:
    """Deduplication key: lowercased with whitespace collapsed."""
    return " ".join(text.split()).lower()


@dataclass(frozen=True)
class Paragraph:
    id: str
    text: str


@dataclass(frozen=True)
class Query:
    id: str
    title: str
    lead: str | None = None
    subtopics: tuple[str, ...] = ()


@dataclass(frozen=True)
class Corpus:
    """Immutable paragraph collection; safe for concurrent reads."""

    paragraphs: dict[str, Paragraph]
    avgdl: float

    @property
    def n(self) -> int:
        return len(self.paragraphs)

    def __contains__(self, paragraph_id: str) -> bool:
        return paragraph_id in self.paragraphs

    @classmethod
    def from_paragraphs(cls, paragraphs: Iterable[Paragraph]) -> "Corpus":
        by_id: dict[str, Paragraph] = {}
        total_tokens = 0
        for par in paragraphs:
            if par.id in by_id:
                raise DataError(f"duplicate paragraph id: {par.id!r}")
            by_id[par.id] = par
            total_tokens += len(tokenize(par.text))
        avgdl = total_tokens / len(by_id) if by_id else 0.0
        return cls(paragraphs=by_id, avgdl=avgdl)


def _check_id(value: object, what: str, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise DataError(f"{where}: {what} must be a non-empty string")
    if any(ch.isspace() for ch in value):
        # ids appear in whitespace-separated file formats
        raise DataError(f"{where}: {what} {value!r} must not contain whitespace")
    return value


def ingest_corpus(path: str | Path, dedup: bool = True) -> Corpus:
    """Load a line-oriented corpus file of {"id", "text"} records.

    When `dedup` is set, a paragraph whose normalized text duplicates an
    earlier one is dropped (the first occurrence wins). Ids must be unique
    either way.
    """
    path = Path(path)
    paragraphs: list[Paragraph] = []
    seen_ids: set[str] = set()
    seen_norm: set[str] = set()
    for lineno, rec in iter_jsonl(path):
        where = f"{path}:{lineno}"
        pid = _check_id(rec.get("id"), "id", where)
        text = rec.get("text")
        if not isinstance(text, str) or not text.strip():
            raise DataError(f"{where}: paragraph {pid!r} has empty text")
        if pid in seen_ids:
            raise DataError(f"{where}: duplicate paragraph id {pid!r}")
        seen_ids.add(pid)
        if dedup:
            norm = normalize_text(text)
            if norm in seen_norm:
                continue
            seen_norm.add(norm)
        paragraphs.append(Paragraph(id=pid, text=text))
    return Corpus.from_paragraphs(paragraphs)


def load_queries(path: str | Path) -> list[Query]:
    """Load {"id", "title", "lead"?, "subtopics"?} records."""
    path = Path(path)
    queries: list[Query] = []
    seen: set[str] = set()
    for lineno, rec in iter_jsonl(path):
        where = f"{path}:{lineno}"
        qid = _check_id(rec.get("id"), "query id", where)
        if "/" in qid:
            raise DataError(f"{where}: query id {qid!r} must not contain '/'")
        if qid in seen:
            raise DataError(f"{where}: duplicate query id {qid!r}")
        seen.add(qid)
        title = rec.get("title")
        if not isinstance(title, str) or not title.strip():
            raise DataError(f"{where}: query {qid!r} has empty title")
        lead = rec.get("lead")
        if lead is not None and not isinstance(lead, str):
            raise DataError(f"{where}: query {qid!r} lead must be a string")
        subtopics = rec.get("subtopics") or []
        if not isinstance(subtopics, list) or any(
            not isinstance(s, str) or not s.strip() for s in subtopics
        ):
            raise DataError(f"{where}: query {qid!r} subtopics must be non-empty strings")
        if len(set(subtopics)) != len(subtopics):
            raise DataError(f"{where}: query {qid!r} has duplicate subtopics")
        queries.append(Query(id=qid, title=title, lead=lead, subtopics=tuple(subtopics)))
    return queries


def write_corpus(corpus: Corpus, path: str | Path) -> Path:
    records = [{"id": p.id, "text": p.text} for p in corpus.paragraphs.values()]
    return write_text_atomic(path, dump_jsonl(records))


def write_queries(queries: Iterable[Query], path: str | Path) -> Path:
    records = []
    for q in queries:
        rec: dict = {"id": q.id, "title": q.title}
        if q.lead is not None:
            rec["lead"] = q.lead
        if q.subtopics:
            rec["subtopics"] = list(q.subtopics)
        records.append(rec)
    return write_text_atomic(path, dump_jsonl(records))
