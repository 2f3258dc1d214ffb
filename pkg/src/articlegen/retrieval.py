"""BM25 retrieval over an inverted index, plus reciprocal rank aggregation.

Three query strategies produce top-k rankings:

* ``bm25-title``             — the query title alone.
* ``bm25-topic-expansion``   — title expanded with all subtopic headings.
* ``bm25-topic-aggregation`` — one search per subtopic (title + heading),
  merged by summing 1/rank per document across the per-subtopic rankings.

Scoring uses idf = ln(1 + (N - df + 0.5)/(df + 0.5)) and
score(d) = sum_t idf(t) * tf / (tf + k1 * (1 - b + b * dl/avgdl)) over the
distinct query terms, so repeating a term in the query text does not
re-weight it. Ties are always broken by ascending paragraph id.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .corpus import Corpus, Query, tokenize
from .errors import DataError
from .fileio import write_text_atomic

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_TOP_K = 50

METHOD_TITLE = "bm25-title"
METHOD_TOPIC_EXPANSION = "bm25-topic-expansion"
METHOD_TOPIC_AGGREGATION = "bm25-topic-aggregation"
RETRIEVAL_METHODS = (METHOD_TITLE, METHOD_TOPIC_EXPANSION, METHOD_TOPIC_AGGREGATION)


class RankedEntry(NamedTuple):
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class Ranking:
    query_id: str
    entries: tuple[RankedEntry, ...]
    method: str

    def __post_init__(self):
        seen: set[str] = set()
        prev = math.inf
        for i, entry in enumerate(self.entries):
            if entry.rank != i + 1:
                raise DataError(f"ranking {self.query_id}: ranks not contiguous from 1")
            if entry.score > prev:
                raise DataError(f"ranking {self.query_id}: scores increase at rank {entry.rank}")
            if entry.doc_id in seen:
                raise DataError(f"ranking {self.query_id}: duplicate doc {entry.doc_id!r}")
            seen.add(entry.doc_id)
            prev = entry.score

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def rank_of(self) -> dict[str, int]:
        return {e.doc_id: e.rank for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


def ranking_from_scores(
    query_id: str, scores: dict[str, float], k: int, method: str
) -> Ranking:
    """Top-k ranking from a score map; ties broken by ascending doc id."""
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    entries = tuple(
        RankedEntry(doc_id=doc, score=score, rank=i + 1)
        for i, (doc, score) in enumerate(ordered)
    )
    return Ranking(query_id=query_id, entries=entries, method=method)


@dataclass(frozen=True)
class InvertedIndex:
    postings: dict[str, tuple[tuple[str, int], ...]]  # term -> ((doc, tf), ...) by doc id
    doc_lengths: dict[str, int]
    n_docs: int
    avgdl: float
    k1: float
    b: float

    def idf(self, term: str) -> float:
        posting = self.postings.get(term)
        df = len(posting) if posting else 0
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))


def build_index(corpus: Corpus, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> InvertedIndex:
    if corpus.n == 0:
        raise DataError("cannot index an empty corpus")
    if k1 < 0:
        raise DataError(f"k1 must be >= 0, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise DataError(f"b must be within [0, 1], got {b}")
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    for pid in sorted(corpus.paragraphs):
        tokens = tokenize(corpus.paragraphs[pid].text)
        doc_lengths[pid] = len(tokens)
        for tok in tokens:
            bucket = postings.setdefault(tok, {})
            bucket[pid] = bucket.get(pid, 0) + 1
    frozen = {
        term: tuple(sorted(bucket.items())) for term, bucket in sorted(postings.items())
    }
    avgdl = sum(doc_lengths.values()) / len(doc_lengths)
    return InvertedIndex(
        postings=frozen, doc_lengths=doc_lengths, n_docs=corpus.n, avgdl=avgdl, k1=k1, b=b
    )


def bm25_search(index: InvertedIndex, query_text: str, k: int = DEFAULT_TOP_K) -> Ranking:
    """Rank the top k paragraphs for a free-text query.

    A query that tokenizes to nothing yields an empty ranking. Documents
    matching no query term are excluded.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    terms = sorted(set(tokenize(query_text)))
    scores: dict[str, float] = {}
    for term in terms:
        posting = index.postings.get(term)
        if not posting:
            continue
        idf = index.idf(term)
        for doc_id, tf in posting:
            dl = index.doc_lengths[doc_id]
            denom = tf + index.k1 * (1.0 - index.b + index.b * dl / index.avgdl)
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf / denom
    return ranking_from_scores("", scores, k, "bm25")


def _stamped(ranking: Ranking, query_id: str, method: str) -> Ranking:
    # Ranking is frozen; stamp query id + method tag after raw scoring.
    return Ranking(query_id=query_id, entries=ranking.entries, method=method)


def search_query(
    index: InvertedIndex, query: Query, k: int = DEFAULT_TOP_K
) -> Ranking:
    """`bm25-title`: the query title as the search text."""
    return _stamped(bm25_search(index, query.title, k), query.id, METHOD_TITLE)


def bm25_topic_expansion(
    index: InvertedIndex, query: Query, k: int = DEFAULT_TOP_K
) -> Ranking:
    """Expand the title with every subtopic heading (each heading once)."""
    if not query.subtopics:
        raise DataError(
            f"query {query.id!r}: topic expansion needs subtopic headings (oracle data)"
        )
    expanded = " ".join([query.title, *query.subtopics])
    return _stamped(bm25_search(index, expanded, k), query.id, METHOD_TOPIC_EXPANSION)


def rrf_aggregate(
    rankings: list[Ranking], k: int = DEFAULT_TOP_K, method: str = "rrf"
) -> Ranking:
    """Merge rankings by reciprocal rank: score(d) = sum over rankings of 1/rank(d).

    No additive offset. Ties broken by ascending paragraph id.
    """
    if not rankings:
        raise DataError("rrf_aggregate needs at least one ranking")
    query_ids = {r.query_id for r in rankings}
    if len(query_ids) != 1:
        raise DataError(f"rrf_aggregate: mixed query ids {sorted(query_ids)}")
    scores: dict[str, float] = {}
    for ranking in rankings:
        for entry in ranking.entries:
            scores[entry.doc_id] = scores.get(entry.doc_id, 0.0) + 1.0 / entry.rank
    return ranking_from_scores(query_ids.pop(), scores, k, method)


def bm25_topic_aggregation(
    index: InvertedIndex, query: Query, k: int = DEFAULT_TOP_K
) -> Ranking:
    """Search once per subtopic (title + heading), then merge by 1/rank."""
    if not query.subtopics:
        raise DataError(
            f"query {query.id!r}: topic aggregation needs subtopic headings (oracle data)"
        )
    per_subtopic = [
        _stamped(bm25_search(index, f"{query.title} {heading}", k), query.id, "bm25-subtopic")
        for heading in query.subtopics
    ]
    return rrf_aggregate(per_subtopic, k, METHOD_TOPIC_AGGREGATION)


def retrieve(index: InvertedIndex, query: Query, method: str, k: int = DEFAULT_TOP_K) -> Ranking:
    """Dispatch on a retrieval method tag."""
    if method == METHOD_TITLE:
        return search_query(index, query, k)
    if method == METHOD_TOPIC_EXPANSION:
        return bm25_topic_expansion(index, query, k)
    if method == METHOD_TOPIC_AGGREGATION:
        return bm25_topic_aggregation(index, query, k)
    raise DataError(f"unknown retrieval method {method!r}")


# --- TREC run files --------------------------------------------------------


def format_run_lines(rankings: Iterable[Ranking]) -> str:
    lines = []
    for ranking in rankings:
        for entry in ranking.entries:
            lines.append(
                f"{ranking.query_id} Q0 {entry.doc_id} {entry.rank} {entry.score:.6f} {ranking.method}\n"
            )
    return "".join(lines)


def write_run_file(rankings: Iterable[Ranking], path: str | Path) -> Path:
    return write_text_atomic(path, format_run_lines(rankings))


def read_run_file(path: str | Path) -> list[Ranking]:
    path = Path(path)
    per_query: dict[str, list[tuple[int, str, float, str]]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise DataError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
            qid, _q0, doc_id, rank_s, score_s, tag = parts
            try:
                rank = int(rank_s)
                score = float(score_s)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad rank or score") from exc
            per_query.setdefault(qid, []).append((rank, doc_id, score, tag))
    rankings = []
    for qid in sorted(per_query):
        rows = sorted(per_query[qid])
        entries = tuple(RankedEntry(doc_id=d, score=s, rank=r) for r, d, s, _ in rows)
        rankings.append(Ranking(query_id=qid, entries=entries, method=rows[0][3]))
    return rankings


def save_index(index: InvertedIndex, path: str | Path) -> Path:
    """Serialize the index as a JSON snapshot."""
    obj = {
        "k1": index.k1,
        "b": index.b,
        "n_docs": index.n_docs,
        "avgdl": index.avgdl,
        "doc_lengths": dict(sorted(index.doc_lengths.items())),
        "postings": {
            term: [[doc, tf] for doc, tf in entries]
            for term, entries in sorted(index.postings.items())
        },
    }
    return write_text_atomic(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def load_index(path: str | Path) -> InvertedIndex:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            obj = json.load(fh)
        postings = {
            term: tuple((doc, int(tf)) for doc, tf in entries)
            for term, entries in obj["postings"].items()
        }
        return InvertedIndex(
            postings=postings,
            doc_lengths={doc: int(n) for doc, n in obj["doc_lengths"].items()},
            n_docs=int(obj["n_docs"]),
            avgdl=float(obj["avgdl"]),
            k1=float(obj["k1"]),
            b=float(obj["b"]),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed index snapshot: {exc}") from exc
