"""Shared fixtures: the committed miniature benchmark, loaded once."""

from __future__ import annotations

from pathlib import Path

import pytest

from articlegen.benchmark import Benchmark, derive_benchmark, load_outlines, read_qrels
from articlegen.corpus import Corpus, ingest_corpus
from articlegen.retrieval import RankedEntry, Ranking
from articlegen.similarity import EmbeddingStore, load_embeddings

MINI_DIR = Path(__file__).parent / "fixtures" / "mini"


@pytest.fixture(scope="session")
def mini_paths() -> dict[str, Path]:
    return {
        "corpus": MINI_DIR / "corpus.jsonl",
        "outlines": MINI_DIR / "outlines.jsonl",
        "embeddings": MINI_DIR / "embeddings.tsv",
        "manual_qrels": MINI_DIR / "manual_qrels.txt",
    }


@pytest.fixture(scope="session")
def mini_corpus(mini_paths) -> Corpus:
    return ingest_corpus(mini_paths["corpus"])


@pytest.fixture(scope="session")
def mini_benchmark(mini_paths, mini_corpus) -> Benchmark:
    return derive_benchmark(load_outlines(mini_paths["outlines"]), mini_corpus)


@pytest.fixture(scope="session")
def mini_store(mini_paths) -> EmbeddingStore:
    return load_embeddings(mini_paths["embeddings"])


@pytest.fixture(scope="session")
def mini_manual(mini_paths):
    return read_qrels(mini_paths["manual_qrels"])


def make_ranking(query_id: str, doc_ids: list[str], method: str = "test") -> Ranking:
    """Ranking helper: descending synthetic scores, ranks 1..n."""
    entries = tuple(
        RankedEntry(doc_id=doc, score=float(len(doc_ids) - i), rank=i + 1)
        for i, doc in enumerate(doc_ids)
    )
    return Ranking(query_id=query_id, entries=entries, method=method)
