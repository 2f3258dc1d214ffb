"""Independent brute-force reference implementations.

Each function here restates a metric or algorithm from its mathematical
definition, sharing no code with the package, so tests can compare the
production implementations against something that is obviously correct on
small instances. Clarity over speed throughout.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from typing import Iterable, Mapping, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+")


def ap_bruteforce(ranked_ids: Sequence[str], relevant: set[str]) -> float:
    """Average precision straight from the definition."""
    hits = 0
    acc = 0.0
    for i, doc in enumerate(ranked_ids, start=1):
        if doc in relevant:
            hits += 1
            acc += hits / i
    return acc / len(relevant)


def ari_bruteforce(a: Mapping[str, object], b: Mapping[str, object]) -> float:
    """ARI by enumerating every item pair and counting agreements."""
    items = sorted(set(a) & set(b))
    same_a = lambda x, y: a[x] == a[y]  # noqa: E731
    same_b = lambda x, y: b[x] == b[y]  # noqa: E731
    groups_a = sorted(sorted(g) for g in _group_items(a, items))
    groups_b = sorted(sorted(g) for g in _group_items(b, items))
    if groups_a == groups_b:
        return 1.0
    n11 = n00 = n10 = n01 = 0
    for x, y in itertools.combinations(items, 2):
        in_a, in_b = same_a(x, y), same_b(x, y)
        if in_a and in_b:
            n11 += 1
        elif not in_a and not in_b:
            n00 += 1
        elif in_a:
            n10 += 1
        else:
            n01 += 1
    denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00)
    if denom == 0:
        return 0.0
    return 2.0 * (n11 * n00 - n10 * n01) / denom


def _group_items(labeling: Mapping[str, object], items: Iterable[str]) -> list[list[str]]:
    groups: dict[object, list[str]] = {}
    for item in items:
        groups.setdefault(labeling[item], []).append(item)
    return list(groups.values())


def rouge_bruteforce(candidate: str, reference: str, n: int) -> tuple[float, float, float]:
    """Clipped n-gram precision/recall/F1 from multiset intersection."""
    cand_tokens = _TOKEN_RE.findall(candidate.lower())
    ref_tokens = _TOKEN_RE.findall(reference.lower())
    cand_grams = Counter(tuple(cand_tokens[i : i + n]) for i in range(len(cand_tokens) - n + 1))
    ref_grams = Counter(tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1))
    match = sum((cand_grams & ref_grams).values())
    p = match / sum(cand_grams.values()) if cand_grams else 0.0
    r = match / sum(ref_grams.values()) if ref_grams else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def rrf_bruteforce(rankings: Sequence[Sequence[str]]) -> list[str]:
    """Documents ordered by summed reciprocal rank, ties by ascending id."""
    scores: dict[str, float] = {}
    for ranking in rankings:
        for rank, doc in enumerate(ranking, start=1):
            scores[doc] = scores.get(doc, 0.0) + 1.0 / rank
    return sorted(scores, key=lambda d: (-scores[d], d))


def bm25_bruteforce(
    docs: Mapping[str, str], query_terms: Sequence[str], k1: float = 1.2, b: float = 0.75
) -> dict[str, float]:
    """Score every document against the distinct query terms, one scalar
    at a time; returns only non-zero scores."""
    tokenized = {doc_id: _TOKEN_RE.findall(text.lower()) for doc_id, text in docs.items()}
    n = len(docs)
    avgdl = sum(len(toks) for toks in tokenized.values()) / n if n else 0.0
    scores: dict[str, float] = {}
    for term in dict.fromkeys(query_terms):
        df = sum(1 for toks in tokenized.values() if term in toks)
        if df == 0:
            continue
        idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
        for doc_id, toks in tokenized.items():
            tf = toks.count(term)
            if tf == 0:
                continue
            norm = tf + k1 * (1.0 - b + b * len(toks) / avgdl)
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf / norm
    return scores


def modularity_bruteforce(
    n_nodes: int,
    edges: Sequence[tuple[int, int, float]],
    communities: Sequence[int],
    gamma: float = 1.0,
) -> float:
    """Resolution-weighted modularity summed community by community."""
    m = sum(w for _, _, w in edges)
    if m == 0:
        return 0.0
    total = 0.0
    for c in set(communities):
        members = {v for v in range(n_nodes) if communities[v] == c}
        internal = sum(w for u, v, w in edges if u in members and v in members)
        degree = sum(
            w * ((u in members) + (v in members)) for u, v, w in edges
        )
        total += internal / m - gamma * (degree / (2.0 * m)) ** 2
    return total


def _set_partitions(items: Sequence[int]):
    """All partitions of `items` (Bell-number many; keep inputs tiny)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [partition[i] + [first]] + partition[i + 1 :]
        yield partition + [[first]]


def best_modularity_exhaustive(
    n_nodes: int, edges: Sequence[tuple[int, int, float]], gamma: float = 1.0
) -> tuple[float, list[list[int]]]:
    """Globally optimal modularity by trying every partition."""
    best = -math.inf
    best_partition: list[list[int]] = []
    for partition in _set_partitions(list(range(n_nodes))):
        communities = [0] * n_nodes
        for label, group in enumerate(partition):
            for v in group:
                communities[v] = label
        q = modularity_bruteforce(n_nodes, edges, communities, gamma)
        if q > best:
            best = q
            best_partition = [sorted(g) for g in partition]
    return best, sorted(best_partition)
