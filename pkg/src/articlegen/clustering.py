"""Hierarchical agglomerative clustering of retrieved paragraphs.

Bottom-up average-linkage merging under a pluggable pairwise similarity,
stopped at exactly K clusters. Merge ties are broken by the pair with
the lexicographically smallest (min member id, min member id), which
makes the result independent of candidate presentation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .benchmark import ClusterGold
from .corpus import Query
from .errors import DataError


@dataclass(frozen=True)
class Clustering:
    """A partition of candidate paragraphs into k clusters (indices 0..k-1)."""

    query_id: str
    assignments: Mapping[str, int]
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DataError(f"query {self.query_id!r}: cluster count must be >= 1")
        seen = set(self.assignments.values())
        if seen != set(range(self.k)):
            raise DataError(
                f"query {self.query_id!r}: expected exactly {self.k} non-empty clusters, "
                f"found indices {sorted(seen)}"
            )

    def clusters(self) -> tuple[tuple[str, ...], ...]:
        """Members per cluster index, each sorted ascending."""
        groups: list[list[str]] = [[] for _ in range(self.k)]
        for pid, idx in self.assignments.items():
            groups[idx].append(pid)
        return tuple(tuple(sorted(g)) for g in groups)

    def members(self, index: int) -> tuple[str, ...]:
        return self.clusters()[index]


def hac_cluster(
    candidates: Sequence[str],
    sim: Callable[[str, str], float],
    k: int,
    query_id: str = "",
) -> Clustering:
    """Average-linkage agglomerative clustering down to exactly k clusters.

    Cross-cluster similarity sums are carried through merges, so each
    linkage value is the exact mean over all member pairs without
    rescanning them.
    """
    ids = list(candidates)
    if len(set(ids)) != len(ids):
        raise DataError(f"query {query_id!r}: duplicate candidate ids")
    n = len(ids)
    if n == 0:
        raise DataError(f"query {query_id!r}: no candidates to cluster")
    if not 1 <= k <= n:
        raise DataError(f"query {query_id!r}: k={k} out of range [1, {n}]")

    # Clusters keyed by their min member id; cross sums keyed by (lo, hi) key pair.
    members: dict[str, set[str]] = {pid: {pid} for pid in ids}
    sums: dict[tuple[str, str], float] = {}
    ordered = sorted(ids)
    for i in range(n):
        for j in range(i + 1, n):
            value = sim(ordered[i], ordered[j])
            if not math.isfinite(value):
                raise DataError(
                    f"query {query_id!r}: non-finite similarity for pair "
                    f"({ordered[i]!r}, {ordered[j]!r})"
                )
            sums[(ordered[i], ordered[j])] = value

    while len(members) > k:
        best_pair: tuple[str, str] | None = None
        best_link = -math.inf
        for pair, total in sums.items():
            link = total / (len(members[pair[0]]) * len(members[pair[1]]))
            if link > best_link or (link == best_link and (best_pair is None or pair < best_pair)):
                best_link = link
                best_pair = pair
        assert best_pair is not None
        lo, hi = best_pair
        merged = members.pop(lo) | members.pop(hi)
        del sums[best_pair]
        for other in members:
            a = sums.pop((min(lo, other), max(lo, other)))
            b = sums.pop((min(hi, other), max(hi, other)))
            sums[(min(lo, other), max(lo, other))] = a + b
        members[lo] = merged

    final = sorted(members.values(), key=min)
    assignments = {pid: idx for idx, group in enumerate(final) for pid in group}
    return Clustering(query_id=query_id, assignments=assignments, k=len(final))


def true_k(query: Query, cluster_gold: ClusterGold) -> int:
    """Number of distinct gold labels for the query."""
    return cluster_gold.label_count(query.id)


def format_cluster_lines(clustering: Clustering) -> list[str]:
    """`<qid> <pid> <cluster index>` lines, sorted for stable output."""
    return [
        f"{clustering.query_id} {pid} {clustering.assignments[pid]}"
        for pid in sorted(clustering.assignments)
    ]


def read_cluster_lines(lines: Iterable[str]) -> dict[str, Clustering]:
    """Parse `<qid> <pid> <label>` lines into per-query clusterings.

    Labels need not be dense integers on input; they are re-indexed by
    sorted label order.
    """
    raw: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataError(f"cluster line {lineno}: expected 'qid pid label', got {line!r}")
        qid, pid, label = parts
        if pid in raw.setdefault(qid, {}):
            raise DataError(f"cluster line {lineno}: duplicate assignment for {qid}/{pid}")
        raw[qid][pid] = label
    out: dict[str, Clustering] = {}
    for qid, mapping in raw.items():
        labels = sorted(set(mapping.values()))
        index = {label: i for i, label in enumerate(labels)}
        out[qid] = Clustering(
            query_id=qid,
            assignments={pid: index[label] for pid, label in mapping.items()},
            k=len(labels),
        )
    return out
