"""Cluster-to-section summarization and article assembly.

Per cluster: summarize each paragraph, group near-duplicate summaries
into redundancy sets with Louvain on a thresholded similarity graph,
consolidate each set to one representative, then order representatives
largest set first and greedily by similarity. Sections are ordered by
their best retrieval rank. Every summary carries the source paragraph
ids it was built from.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .clustering import Clustering
from .corpus import Corpus, Paragraph, Query, tokenize
from .errors import DataError, ProviderError
from .fileio import dump_jsonl, iter_jsonl, write_text_atomic
from .louvain import louvain_communities
from .providers import NativeSummarizer, RemoteEmbedder, Summarizer
from .retrieval import Ranking

GAMMA_PRESETS = {"short": 0.25, "long": 1.0}
DEFAULT_TAU = 0.35
DEFAULT_MAX_SENTENCES = 2
DEFAULT_LOUVAIN_SEED = 11


@dataclass(frozen=True)
class SummarizeConfig:
    max_sentences: int = DEFAULT_MAX_SENTENCES
    tau: float = DEFAULT_TAU
    length: str = "long"
    gamma: float | None = None  # explicit value overrides the length preset
    louvain_seed: int = DEFAULT_LOUVAIN_SEED

    def resolved_gamma(self) -> float:
        if self.gamma is not None:
            if self.gamma <= 0:
                raise DataError(f"gamma must be > 0, got {self.gamma}")
            return self.gamma
        if self.length not in GAMMA_PRESETS:
            raise DataError(
                f"unknown length preset {self.length!r}, expected one of "
                f"{sorted(GAMMA_PRESETS)}"
            )
        return GAMMA_PRESETS[self.length]


@dataclass(frozen=True)
class PreliminarySummary:
    source_id: str
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise DataError(f"paragraph {self.source_id!r}: empty preliminary summary")


@dataclass(frozen=True)
class RedundancySet:
    """Near-duplicate summaries consolidated under one representative.

    Members stay in retrieval-rank order; provenance is their source ids
    sorted ascending.
    """

    members: tuple[PreliminarySummary, ...]
    representative: str
    provenance: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise DataError("redundancy set needs at least one member")
        if not self.representative:
            raise DataError("redundancy set has an empty representative")
        if self.provenance != tuple(sorted(s.source_id for s in self.members)):
            raise DataError("provenance must be exactly the member source ids")

    @classmethod
    def from_members(cls, members: Sequence[PreliminarySummary]) -> "RedundancySet":
        members = tuple(members)
        return cls(
            members=members,
            representative=members[0].text,
            provenance=tuple(sorted(s.source_id for s in members)),
        )

    def min_source_id(self) -> str:
        return self.provenance[0]


@dataclass(frozen=True)
class GeneratedArticle:
    query_id: str
    sections: tuple[tuple[tuple[str, tuple[str, ...]], ...], ...]
    method: Mapping[str, str]

    def __post_init__(self) -> None:
        # Zero sections is legal only for the flagged empty-retrieval case.
        for section in self.sections:
            if not section:
                raise DataError(f"query {self.query_id!r}: article has an empty section")

    def provenance_ids(self) -> set[str]:
        return {
            pid
            for section in self.sections
            for _, provenance in section
            for pid in provenance
        }

    def flat_text(self) -> str:
        """Plain-text rendering: summaries joined by spaces, sections
        separated by blank lines."""
        return "\n\n".join(
            " ".join(text for text, _ in section) for section in self.sections
        )

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "method": dict(self.method),
            "sections": [
                [{"text": text, "provenance": list(prov)} for text, prov in section]
                for section in self.sections
            ],
            "flat_text": self.flat_text(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratedArticle":
        try:
            sections = tuple(
                tuple((item["text"], tuple(item["provenance"])) for item in section)
                for section in obj["sections"]
            )
            return cls(query_id=obj["query_id"], sections=sections, method=obj["method"])
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed article record: {exc}") from exc


PairSim = Callable[[PreliminarySummary, PreliminarySummary], float]


def lexical_similarity(a: str, b: str) -> float:
    """Cosine over token term-frequency vectors; 0 when either side has
    no tokens."""
    ca, cb = Counter(tokenize(a)), Counter(tokenize(b))
    if not ca or not cb:
        return 0.0
    dot = sum(n * cb[t] for t, n in ca.items())
    na = math.sqrt(sum(n * n for n in ca.values()))
    nb = math.sqrt(sum(n * n for n in cb.values()))
    return dot / (na * nb)


def lexical_pair_similarity(a: PreliminarySummary, b: PreliminarySummary) -> float:
    return lexical_similarity(a.text, b.text)


def embedded_pair_similarity(
    summaries: Sequence[PreliminarySummary], embedder: RemoteEmbedder
) -> PairSim:
    """Pair similarity backed by one batched embedding call: cosine over
    the provider's vectors, keyed by source id."""
    vectors = embedder.embed([s.text for s in summaries])
    by_id: dict[str, list[float]] = {}
    for summary, vec in zip(summaries, vectors):
        by_id[summary.source_id] = vec

    def sim(a: PreliminarySummary, b: PreliminarySummary) -> float:
        u, v = by_id[a.source_id], by_id[b.source_id]
        dot = sum(x * y for x, y in zip(u, v))
        nu = math.sqrt(sum(x * x for x in u))
        nv = math.sqrt(sum(y * y for y in v))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        return dot / (nu * nv)

    return sim


def preliminary_summarize(
    paragraph: Paragraph, provider: Summarizer, max_sentences: int
) -> PreliminarySummary:
    if max_sentences < 1:
        raise DataError(f"max_sentences must be >= 1, got {max_sentences}")
    try:
        text = provider.summarize(paragraph.text, max_sentences)
    except ProviderError as exc:
        raise ProviderError(f"paragraph {paragraph.id!r}: {exc}") from exc
    if not text:
        raise DataError(f"paragraph {paragraph.id!r}: provider returned an empty summary")
    return PreliminarySummary(source_id=paragraph.id, text=text)


def redundancy_sets(
    summaries: Sequence[PreliminarySummary],
    sim: PairSim,
    tau: float = DEFAULT_TAU,
    gamma: float = 1.0,
    seed: int = DEFAULT_LOUVAIN_SEED,
) -> list[RedundancySet]:
    """Partition summaries into redundancy sets.

    Edge (i, j) with weight sim(i, j) enters the graph when the
    similarity clears tau; communities of the thresholded graph become
    the sets. Zero-weight pairs are left out: they cannot affect
    modularity. Sets come back numbered by smallest member position, so
    input (rank) order drives the output order.
    """
    if tau < 0:
        raise DataError(f"tau must be >= 0, got {tau}")
    if gamma <= 0:
        raise DataError(f"gamma must be > 0, got {gamma}")
    ids = [s.source_id for s in summaries]
    if len(set(ids)) != len(ids):
        raise DataError("duplicate source ids among summaries")
    if not summaries:
        return []
    edges: list[tuple[int, int, float]] = []
    for i in range(len(summaries)):
        for j in range(i + 1, len(summaries)):
            value = sim(summaries[i], summaries[j])
            if not math.isfinite(value):
                raise DataError(
                    f"non-finite similarity for pair ({ids[i]!r}, {ids[j]!r})"
                )
            if value >= tau and value > 0.0:
                edges.append((i, j, value))
    communities = louvain_communities(len(summaries), edges, gamma=gamma, seed=seed)
    groups: dict[int, list[PreliminarySummary]] = {}
    for idx, community in enumerate(communities):
        groups.setdefault(community, []).append(summaries[idx])
    return [RedundancySet.from_members(groups[c]) for c in sorted(groups)]


def consolidate_set(
    rset: RedundancySet,
    provider: Summarizer,
    sim: PairSim = lexical_pair_similarity,
    max_sentences: int = DEFAULT_MAX_SENTENCES,
) -> RedundancySet:
    """Pick the set's representative text.

    An abstractive provider summarizes the members concatenated in
    ascending retrieval-rank order. The extractive path keeps the medoid
    member (highest mean similarity to the others; ties by ascending
    source id). Provenance is untouched.
    """
    if len(rset.members) == 1:
        representative = rset.members[0].text
    elif provider.abstractive:
        joined = " ".join(s.text for s in rset.members)
        representative = provider.summarize(joined, max_sentences)
        if not representative:
            raise DataError(
                f"set {rset.provenance}: provider returned an empty consolidation"
            )
    else:
        best_id: str | None = None
        best_avg = -math.inf
        for candidate in sorted(rset.members, key=lambda s: s.source_id):
            others = [s for s in rset.members if s.source_id != candidate.source_id]
            avg = sum(sim(candidate, other) for other in others) / len(others)
            if avg > best_avg:
                best_avg = avg
                best_id = candidate.source_id
        representative = next(s.text for s in rset.members if s.source_id == best_id)
    return RedundancySet(
        members=rset.members, representative=representative, provenance=rset.provenance
    )


def order_section(sets: Sequence[RedundancySet], sim: PairSim) -> list[RedundancySet]:
    """Largest set first (ties by ascending min source id), then greedy:
    repeatedly append the unplaced set most similar to the last placed
    one, same tie rule. Similarity is taken between representatives."""
    if not sets:
        raise DataError("cannot order an empty section")
    remaining = list(sets)
    remaining.sort(key=lambda s: (-len(s.members), s.min_source_id()))
    ordered = [remaining.pop(0)]
    while remaining:
        last = ordered[-1]
        last_repr = PreliminarySummary(source_id=last.min_source_id(), text=last.representative)
        best_idx = 0
        best_key: tuple[float, str] | None = None
        for idx, candidate in enumerate(remaining):
            cand_repr = PreliminarySummary(
                source_id=candidate.min_source_id(), text=candidate.representative
            )
            key = (-sim(last_repr, cand_repr), candidate.min_source_id())
            if best_key is None or key < best_key:
                best_key = key
                best_idx = idx
        ordered.append(remaining.pop(best_idx))
    return ordered


def assemble_article(
    query: Query,
    clustering: Clustering,
    ranking: Ranking,
    corpus: Corpus,
    provider: Summarizer | None = None,
    config: SummarizeConfig | None = None,
    embedder: RemoteEmbedder | None = None,
    clustering_tag: str = "",
) -> GeneratedArticle:
    """Run the summarize stage for one query and return the article.

    Sections are ordered by the best (minimum) retrieval rank among each
    cluster's members, ties by ascending cluster index.
    """
    provider = provider or NativeSummarizer()
    config = config or SummarizeConfig()
    gamma = config.resolved_gamma()
    ranked_ids = list(ranking.doc_ids())
    if set(clustering.assignments) != set(ranked_ids):
        raise DataError(
            f"query {query.id!r}: clustering and ranking cover different paragraphs"
        )
    rank_of = {doc_id: rank for rank, doc_id in enumerate(ranked_ids, start=1)}

    sections: list[tuple[int, tuple[tuple[str, tuple[str, ...]], ...]]] = []
    for cluster_idx, members in enumerate(clustering.clusters()):
        by_rank = sorted(members, key=lambda pid: rank_of[pid])
        summaries = [
            preliminary_summarize(corpus.paragraphs[pid], provider, config.max_sentences)
            for pid in by_rank
        ]
        sim: PairSim = (
            embedded_pair_similarity(summaries, embedder) if embedder else lexical_pair_similarity
        )
        sets = redundancy_sets(
            summaries, sim, tau=config.tau, gamma=gamma, seed=config.louvain_seed
        )
        consolidated = [
            consolidate_set(s, provider, sim, config.max_sentences) for s in sets
        ]
        # Ordering compares representatives, which consolidation may have
        # rewritten, so the embedded path re-embeds them.
        reprs = [
            PreliminarySummary(source_id=s.min_source_id(), text=s.representative)
            for s in consolidated
        ]
        ordering_sim: PairSim = (
            embedded_pair_similarity(reprs, embedder) if embedder else lexical_pair_similarity
        )
        ordered = order_section(consolidated, ordering_sim)
        best_rank = min(rank_of[pid] for pid in members)
        sections.append(
            (best_rank, tuple((s.representative, s.provenance) for s in ordered))
        )

    sections.sort(key=lambda pair: pair[0])
    method = {
        "retrieval": ranking.method,
        "clustering": clustering_tag or "unspecified",
        "summarizer": provider.tag,
        "length": config.length if config.gamma is None else f"gamma={gamma}",
    }
    article = GeneratedArticle(
        query_id=query.id,
        sections=tuple(body for _, body in sections),
        method=method,
    )
    extra = article.provenance_ids() - set(ranked_ids)
    if extra:
        raise DataError(f"query {query.id!r}: provenance outside the ranking: {sorted(extra)}")
    return article


def write_articles(articles: Iterable[GeneratedArticle], path) -> None:
    write_text_atomic(path, dump_jsonl(a.to_json() for a in articles))


def read_articles(path) -> list[GeneratedArticle]:
    return [GeneratedArticle.from_json(obj) for _, obj in iter_jsonl(path)]
