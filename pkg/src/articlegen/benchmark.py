"""Derive coordinated benchmarks from structured article outlines.

A structured article (title, lead, sections of paragraphs) yields four
agreeing artifacts: a query (title + section headings as subtopics),
binary relevance judgments (every page paragraph), cluster gold labels
(paragraph -> top-level section), and the page text as a gold article.
Because all four come from one source they share a notion of relevance,
which is what lets each pipeline stage be trained and scored separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, Query, _check_id
from .errors import DataError
from .fileio import dump_jsonl, iter_jsonl, write_text_atomic


def slugify(heading: str) -> str:
    """Stable join key for a section heading: lowercase, non-alnum -> '-'."""
    return "".join(ch if ch.isalnum() else "-" for ch in heading.lower())


@dataclass(frozen=True)
class OutlineSection:
    heading: str
    paragraph_ids: tuple[str, ...]


@dataclass(frozen=True)
class ArticleOutline:
    page_id: str
    title: str
    lead: str | None
    sections: tuple[OutlineSection, ...]


@dataclass
class Qrels:
    """Graded relevance, keyed by (query id, optional subtopic slug)."""

    entries: dict[tuple[str, str | None], dict[str, int]] = field(default_factory=dict)

    def add(self, query_id: str, subtopic: str | None, paragraph_id: str, grade: int) -> None:
        if grade < 0:
            raise DataError(f"negative grade for {query_id}/{subtopic}/{paragraph_id}")
        bucket = self.entries.setdefault((query_id, subtopic), {})
        if paragraph_id in bucket:
            raise DataError(
                f"duplicate qrels entry ({query_id}, {subtopic}, {paragraph_id})"
            )
        bucket[paragraph_id] = grade

    def relevant(self, query_id: str, subtopic: str | None = None) -> set[str]:
        bucket = self.entries.get((query_id, subtopic), {})
        return {pid for pid, grade in bucket.items() if grade > 0}

    def for_query(self, query_id: str) -> dict[str | None, dict[str, int]]:
        return {
            slug: dict(bucket)
            for (qid, slug), bucket in self.entries.items()
            if qid == query_id
        }

    def query_ids(self) -> set[str]:
        return {qid for qid, _ in self.entries}


@dataclass
class ClusterGold:
    """Per query: paragraph id -> subtopic label (section slug)."""

    labels: dict[str, dict[str, str]] = field(default_factory=dict)

    def label_count(self, query_id: str) -> int:
        if query_id not in self.labels:
            raise DataError(f"query {query_id!r} has no cluster gold")
        return len(set(self.labels[query_id].values()))


@dataclass(frozen=True)
class CoordinationViolation:
    kind: str  # "unjudged-cluster-member" | "label-not-in-gold"
    query_id: str
    detail: str


@dataclass
class Benchmark:
    queries: list[Query]
    qrels: Qrels
    cluster_gold: ClusterGold
    gold_articles: dict[str, str]
    skipped_pages: list[str] = field(default_factory=list)


def load_outlines(path: str | Path) -> list[ArticleOutline]:
    path = Path(path)
    outlines: list[ArticleOutline] = []
    seen: set[str] = set()
    for lineno, rec in iter_jsonl(path):
        where = f"{path}:{lineno}"
        page_id = _check_id(rec.get("page_id"), "page_id", where)
        if "/" in page_id:
            raise DataError(f"{where}: page_id {page_id!r} must not contain '/'")
        if page_id in seen:
            raise DataError(f"{where}: duplicate page_id {page_id!r}")
        seen.add(page_id)
        title = rec.get("title")
        if not isinstance(title, str) or not title.strip():
            raise DataError(f"{where}: page {page_id!r} has empty title")
        lead = rec.get("lead")
        raw_sections = rec.get("sections")
        if not isinstance(raw_sections, list) or not raw_sections:
            raise DataError(f"{where}: page {page_id!r} has no sections")
        sections: list[OutlineSection] = []
        headings: set[str] = set()
        for sec in raw_sections:
            heading = sec.get("heading") if isinstance(sec, dict) else None
            if not isinstance(heading, str) or not heading.strip():
                raise DataError(f"{where}: page {page_id!r} has a section without heading")
            if heading in headings:
                raise DataError(f"{where}: page {page_id!r} repeats heading {heading!r}")
            headings.add(heading)
            pids = sec.get("paragraph_ids", [])
            if not isinstance(pids, list) or any(not isinstance(p, str) or not p for p in pids):
                raise DataError(
                    f"{where}: page {page_id!r} section {heading!r} has bad paragraph_ids"
                )
            sections.append(OutlineSection(heading=heading, paragraph_ids=tuple(pids)))
        outlines.append(
            ArticleOutline(page_id=page_id, title=title, lead=lead, sections=tuple(sections))
        )
    return outlines


def derive_benchmark(
    outlines: Iterable[ArticleOutline],
    corpus: Corpus,
    min_subtopics: int = 2,
) -> Benchmark:
    """Derive queries, qrels, cluster gold, and gold articles from outlines.

    Pages with fewer than `min_subtopics` sections are skipped and counted;
    a one-section page would make the clustering task degenerate.
    """
    if min_subtopics < 1:
        raise DataError("min_subtopics must be >= 1")
    queries: list[Query] = []
    qrels = Qrels()
    gold = ClusterGold()
    gold_articles: dict[str, str] = {}
    skipped: list[str] = []

    for outline in outlines:
        for section in outline.sections:
            for pid in section.paragraph_ids:
                if pid not in corpus:
                    raise DataError(
                        f"page {outline.page_id!r}: paragraph id {pid!r} not in corpus"
                    )
        if len(outline.sections) < min_subtopics:
            skipped.append(outline.page_id)
            continue

        qid = outline.page_id
        queries.append(
            Query(
                id=qid,
                title=outline.title,
                lead=outline.lead,
                subtopics=tuple(sec.heading for sec in outline.sections),
            )
        )

        labels: dict[str, str] = {}
        blocks: list[str] = []
        if outline.lead:
            blocks.append(outline.lead)
        for section in outline.sections:
            slug = slugify(section.heading)
            for pid in section.paragraph_ids:
                # a paragraph repeated across sections keeps its first
                # label and is judged once; its text still recurs in the
                # gold article because the page shows it again
                if pid not in labels:
                    qrels.add(qid, None, pid, 1)
                    labels[pid] = slug
                blocks.append(corpus.paragraphs[pid].text)
        gold.labels[qid] = labels
        gold_articles[qid] = "\n\n".join(blocks)

    return Benchmark(
        queries=queries,
        qrels=qrels,
        cluster_gold=gold,
        gold_articles=gold_articles,
        skipped_pages=skipped,
    )


def coordination_check(
    queries: list[Query],
    qrels: Qrels,
    cluster_gold: ClusterGold,
    gold_articles: dict[str, str],
    corpus: Corpus | None = None,
) -> list[CoordinationViolation]:
    """Verify the four artifacts agree; violations are data, not errors.

    (a) every cluster-gold paragraph must be relevant in the qrels;
    (b) every cluster label must name one of the query's subtopics, with
        the labeled text present in the gold article (text checked when a
        corpus is supplied).
    """
    violations: list[CoordinationViolation] = []
    by_id = {q.id: q for q in queries}
    for qid in sorted(cluster_gold.labels):
        labels = cluster_gold.labels[qid]
        relevant = qrels.relevant(qid)
        for pid in sorted(labels):
            if pid not in relevant:
                violations.append(
                    CoordinationViolation(
                        kind="unjudged-cluster-member",
                        query_id=qid,
                        detail=f"paragraph {pid!r} labeled {labels[pid]!r} but not relevant",
                    )
                )
        query = by_id.get(qid)
        known_slugs = {slugify(h) for h in query.subtopics} if query else set()
        gold_text = gold_articles.get(qid, "")
        for label in sorted(set(labels.values())):
            if label not in known_slugs or not gold_text:
                violations.append(
                    CoordinationViolation(
                        kind="label-not-in-gold",
                        query_id=qid,
                        detail=f"label {label!r} has no matching section in the gold article",
                    )
                )
                continue
            if corpus is not None:
                for pid in sorted(p for p, lab in labels.items() if lab == label):
                    if pid in corpus and corpus.paragraphs[pid].text not in gold_text:
                        violations.append(
                            CoordinationViolation(
                                kind="label-not-in-gold",
                                query_id=qid,
                                detail=f"text of {pid!r} (label {label!r}) missing from gold article",
                            )
                        )
    return violations


# --- file formats ---------------------------------------------------------


def _qrels_key(query_id: str, subtopic: str | None) -> str:
    return query_id if subtopic is None else f"{query_id}/{subtopic}"


def write_qrels(qrels: Qrels, path: str | Path) -> Path:
    lines = []
    for (qid, slug), bucket in sorted(
        qrels.entries.items(), key=lambda kv: (kv[0][0], kv[0][1] or "")
    ):
        for pid, grade in sorted(bucket.items()):
            lines.append(f"{_qrels_key(qid, slug)} 0 {pid} {grade}\n")
    return write_text_atomic(path, "".join(lines))


def read_qrels(path: str | Path) -> Qrels:
    path = Path(path)
    qrels = Qrels()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            key, _zero, pid, grade_s = parts
            qid, _, slug = key.partition("/")
            try:
                grade = int(grade_s)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad grade {grade_s!r}") from exc
            if grade < 0:
                raise DataError(f"{path}:{lineno}: negative grade")
            try:
                qrels.add(qid, slug or None, pid, grade)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return qrels


def write_cluster_gold(gold: ClusterGold, path: str | Path) -> Path:
    lines = []
    for qid in sorted(gold.labels):
        for pid in sorted(gold.labels[qid]):
            lines.append(f"{qid} {pid} {gold.labels[qid][pid]}\n")
    return write_text_atomic(path, "".join(lines))


def read_cluster_gold(path: str | Path) -> ClusterGold:
    path = Path(path)
    gold = ClusterGold()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            qid, pid, label = parts
            bucket = gold.labels.setdefault(qid, {})
            if pid in bucket:
                raise DataError(f"{path}:{lineno}: duplicate label for ({qid}, {pid})")
            bucket[pid] = label
    return gold


def write_gold_articles(gold_articles: dict[str, str], path: str | Path) -> Path:
    records = [
        {"query_id": qid, "text": gold_articles[qid]} for qid in sorted(gold_articles)
    ]
    return write_text_atomic(path, dump_jsonl(records))


def read_gold_articles(path: str | Path) -> dict[str, str]:
    path = Path(path)
    out: dict[str, str] = {}
    for lineno, rec in iter_jsonl(path):
        qid = rec.get("query_id")
        text = rec.get("text")
        if not isinstance(qid, str) or not isinstance(text, str) or not text:
            raise DataError(f"{path}:{lineno}: bad gold article record")
        if qid in out:
            raise DataError(f"{path}:{lineno}: duplicate gold article for {qid!r}")
        out[qid] = text
    return out
