"""Evaluation metrics: average precision, adjusted Rand index, ROUGE-N,
and a paired bootstrap significance test.

All metrics share the corpus tokenizer (lowercase word tokens, no
stemming, no stopword removal) so retrieval, clustering, and text
overlap are judged on the same token stream.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .corpus import tokenize
from .errors import DataError
from .retrieval import Ranking

DEFAULT_BOOTSTRAP_B = 10_000
DEFAULT_BOOTSTRAP_SEED = 7
DEFAULT_ALPHA = 0.05


def average_precision(ranking: Ranking, relevant: set[str]) -> float:
    """Mean of precision-at-rank over the relevant documents' ranks;
    relevant documents never retrieved contribute zero."""
    if not relevant:
        raise DataError(
            f"query {ranking.query_id!r}: no relevant documents, skip it upstream"
        )
    hits = 0
    total = 0.0
    for entry in ranking.entries:
        if entry.doc_id in relevant:
            hits += 1
            total += hits / entry.rank
    return total / len(relevant)


def _groups(labeling: Mapping[str, object], items: Iterable[str]) -> set[frozenset[str]]:
    by_label: dict[object, set[str]] = {}
    for item in items:
        by_label.setdefault(labeling[item], set()).add(item)
    return {frozenset(group) for group in by_label.values()}


def adjusted_rand_index(a: Mapping[str, object], b: Mapping[str, object]) -> float:
    """Chance-corrected pair-counting agreement of two labelings.

    Computed over the items labeled in both. Identical partitions give
    exactly 1.0; a vanishing adjustment denominator gives 0.0.
    """
    items = sorted(set(a) & set(b))
    if not items:
        raise DataError("labelings share no items, query is unevaluable")
    if _groups(a, items) == _groups(b, items):
        return 1.0
    contingency: dict[tuple[object, object], int] = {}
    row: dict[object, int] = {}
    col: dict[object, int] = {}
    for item in items:
        key = (a[item], b[item])
        contingency[key] = contingency.get(key, 0) + 1
        row[a[item]] = row.get(a[item], 0) + 1
        col[b[item]] = col.get(b[item], 0) + 1
    n = len(items)
    pairs = math.comb(n, 2)
    if pairs == 0:
        return 0.0
    index = sum(math.comb(v, 2) for v in contingency.values())
    sum_a = sum(math.comb(v, 2) for v in row.values())
    sum_b = sum(math.comb(v, 2) for v in col.values())
    expected = sum_a * sum_b / pairs
    max_index = (sum_a + sum_b) / 2.0
    denom = max_index - expected
    if denom == 0.0:
        return 0.0
    return (index - expected) / denom


class RougeScore(NamedTuple):
    precision: float
    recall: float
    f1: float


def _ngram_counts(text: str, n: int) -> Counter:
    tokens = tokenize(text)
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped (multiset) n-gram overlap precision/recall/F1."""
    if n not in (1, 2):
        raise DataError(f"rouge order must be 1 or 2, got {n}")
    cand = _ngram_counts(candidate, n)
    ref = _ngram_counts(reference, n)
    match = sum(min(count, ref[gram]) for gram, count in cand.items())
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    precision = match / cand_total if cand_total else 0.0
    recall = match / ref_total if ref_total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return RougeScore(precision, recall, f1)


class SignificanceResult(NamedTuple):
    p_value: float
    direction: int  # sign of mean(a - b): +1, -1, or 0
    significant: bool
    mean_difference: float


def paired_significance(
    per_query_a: Mapping[str, float],
    per_query_b: Mapping[str, float],
    b_resamples: int = DEFAULT_BOOTSTRAP_B,
    seed: int = DEFAULT_BOOTSTRAP_SEED,
    alpha: float = DEFAULT_ALPHA,
) -> SignificanceResult:
    """Two-sided paired bootstrap on per-query score differences.

    Queries are resampled with replacement b_resamples times; the
    two-sided p-value is twice the smaller tail fraction of resampled
    mean differences at or across zero, capped at 1. All-zero
    differences short-circuit to p = 1.
    """
    if b_resamples < 1000:
        raise DataError(f"need at least 1000 bootstrap resamples, got {b_resamples}")
    if set(per_query_a) != set(per_query_b):
        only_a = sorted(set(per_query_a) - set(per_query_b))
        only_b = sorted(set(per_query_b) - set(per_query_a))
        raise DataError(
            f"per-query key sets differ (only in a: {only_a[:5]}, only in b: {only_b[:5]})"
        )
    keys = sorted(per_query_a)
    diffs = np.array([per_query_a[k] - per_query_b[k] for k in keys], dtype=np.float64)
    observed = float(diffs.mean())
    direction = (observed > 0) - (observed < 0)
    if np.all(diffs == 0.0):
        return SignificanceResult(1.0, 0, False, 0.0)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(diffs), size=(b_resamples, len(diffs)))
    means = diffs[idx].mean(axis=1)
    le = int(np.count_nonzero(means <= 0.0))
    ge = int(np.count_nonzero(means >= 0.0))
    p = min(1.0, 2.0 * min(le, ge) / b_resamples)
    return SignificanceResult(p, direction, p < alpha, observed)


@dataclass(frozen=True)
class MetricReport:
    """Per-query metric values with their mean and the skipped queries."""

    metric: str
    per_query: Mapping[str, float]
    skipped: tuple[str, ...] = ()

    @property
    def aggregate(self) -> float:
        if not self.per_query:
            return 0.0
        return sum(self.per_query.values()) / len(self.per_query)

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "aggregate": self.aggregate,
            "per_query": {k: self.per_query[k] for k in sorted(self.per_query)},
            "skipped": sorted(self.skipped),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MetricReport":
        try:
            return cls(
                metric=obj["metric"],
                per_query=dict(obj["per_query"]),
                skipped=tuple(obj.get("skipped", ())),
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed metric report: {exc}") from exc
