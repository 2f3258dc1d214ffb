"""Outline-derived benchmarks: qrels, cluster gold, gold articles."""

import json

import pytest

from articlegen.benchmark import (
    ArticleOutline,
    OutlineSection,
    Qrels,
    coordination_check,
    derive_benchmark,
    load_outlines,
    read_cluster_gold,
    read_gold_articles,
    read_qrels,
    slugify,
    write_cluster_gold,
    write_gold_articles,
    write_qrels,
)
from articlegen.corpus import Corpus, Paragraph
from articlegen.errors import DataError


def corpus_of(**texts: str) -> Corpus:
    return Corpus.from_paragraphs([Paragraph(pid, text) for pid, text in texts.items()])


def outline(page_id="pg", title="T", lead="L", sections=None) -> ArticleOutline:
    sections = sections or [("History", ["p1", "p2"]), ("Usage", ["p3"])]
    return ArticleOutline(
        page_id=page_id,
        title=title,
        lead=lead,
        sections=tuple(OutlineSection(h, tuple(pids)) for h, pids in sections),
    )


FOUR_PARAGRAPHS = dict(p1="alpha text", p2="beta text", p3="gamma text", p4="delta text")


def test_slugify():
    assert slugify("Natural Resources") == "natural-resources"
    assert slugify("A/B (test)") == "a-b--test-"


class TestLoadOutlines:
    def test_minimal_record(self, tmp_path):
        path = tmp_path / "o.jsonl"
        rec = {
            "page_id": "pg1",
            "title": "T",
            "lead": "L",
            "sections": [{"heading": "H", "paragraph_ids": ["p1"]}],
        }
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        (loaded,) = load_outlines(path)
        assert loaded.page_id == "pg1"
        assert loaded.sections[0].heading == "H"

    def test_repeated_heading_rejected(self, tmp_path):
        path = tmp_path / "o.jsonl"
        rec = {
            "page_id": "pg1",
            "title": "T",
            "sections": [
                {"heading": "H", "paragraph_ids": ["p1"]},
                {"heading": "H", "paragraph_ids": ["p2"]},
            ],
        }
        path.write_text(json.dumps(rec) + "\n", encoding="utf-8")
        with pytest.raises(DataError, match="repeats heading"):
            load_outlines(path)

    def test_sectionless_page_rejected(self, tmp_path):
        path = tmp_path / "o.jsonl"
        path.write_text(json.dumps({"page_id": "pg1", "title": "T", "sections": []}) + "\n")
        with pytest.raises(DataError, match="no sections"):
            load_outlines(path)


class TestDeriveBenchmark:
    def test_query_fields_from_page(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        (query,) = bench.queries
        assert query.id == "pg"
        assert query.title == "T"
        assert query.lead == "L"
        assert query.subtopics == ("History", "Usage")

    def test_all_page_paragraphs_graded_one_at_title_level(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        assert bench.qrels.entries[("pg", None)] == {"p1": 1, "p2": 1, "p3": 1}

    def test_labels_are_section_slugs(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        assert bench.cluster_gold.labels["pg"] == {
            "p1": "history",
            "p2": "history",
            "p3": "usage",
        }

    def test_gold_article_is_lead_plus_paragraphs_in_page_order(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        assert bench.gold_articles["pg"] == "L\n\nalpha text\n\nbeta text\n\ngamma text"

    def test_cross_listed_paragraph_keeps_first_label_and_single_judgment(self):
        pages = [outline(sections=[("A", ["p1", "p2"]), ("B", ["p1", "p3"])])]
        bench = derive_benchmark(pages, corpus_of(**FOUR_PARAGRAPHS))
        assert bench.cluster_gold.labels["pg"]["p1"] == "a"
        assert bench.qrels.entries[("pg", None)]["p1"] == 1
        # the page shows the paragraph twice, so the gold text repeats it
        assert bench.gold_articles["pg"].count("alpha text") == 2

    def test_single_section_page_skipped_and_counted(self):
        pages = [
            outline(page_id="keep"),
            outline(page_id="drop", sections=[("Only", ["p4"])]),
        ]
        bench = derive_benchmark(pages, corpus_of(**FOUR_PARAGRAPHS))
        assert [q.id for q in bench.queries] == ["keep"]
        assert bench.skipped_pages == ["drop"]

    def test_unknown_paragraph_rejected(self):
        with pytest.raises(DataError, match="not in corpus"):
            derive_benchmark([outline()], corpus_of(p1="x"))

    def test_mini_fixture_skips_the_single_section_page(self, mini_benchmark):
        assert mini_benchmark.skipped_pages == ["pg31"]
        assert len(mini_benchmark.queries) == 30

    def test_mini_fixture_is_coordinated(self, mini_benchmark, mini_corpus):
        violations = coordination_check(
            mini_benchmark.queries,
            mini_benchmark.qrels,
            mini_benchmark.cluster_gold,
            mini_benchmark.gold_articles,
            corpus=mini_corpus,
        )
        assert violations == []


class TestCoordinationCheck:
    def test_clustered_but_unjudged_paragraph_flagged(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        bench.cluster_gold.labels["pg"]["p4"] = "history"
        violations = coordination_check(
            bench.queries, bench.qrels, bench.cluster_gold, bench.gold_articles
        )
        assert any(v.kind == "unjudged-cluster-member" for v in violations)

    def test_label_outside_subtopics_flagged(self):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        bench.cluster_gold.labels["pg"]["p1"] = "no-such-section"
        violations = coordination_check(
            bench.queries, bench.qrels, bench.cluster_gold, bench.gold_articles
        )
        assert any(v.kind == "label-not-in-gold" for v in violations)


class TestFileFormats:
    def test_qrels_roundtrip_with_and_without_subtopic(self, tmp_path):
        qrels = Qrels()
        qrels.add("q1", None, "p1", 1)
        qrels.add("q1", "history", "p1", 3)
        path = tmp_path / "qrels.txt"
        write_qrels(qrels, path)
        again = read_qrels(path)
        assert again.entries == qrels.entries

    def test_qrels_reject_negative_grade(self, tmp_path):
        path = tmp_path / "qrels.txt"
        path.write_text("q1 0 p1 -2\n", encoding="utf-8")
        with pytest.raises(DataError, match="negative grade"):
            read_qrels(path)

    def test_qrels_reject_duplicate_judgment(self, tmp_path):
        path = tmp_path / "qrels.txt"
        path.write_text("q1/h 0 p1 1\nq1/h 0 p1 2\n", encoding="utf-8")
        with pytest.raises(DataError, match="duplicate"):
            read_qrels(path)

    def test_cluster_gold_roundtrip(self, tmp_path):
        bench = derive_benchmark([outline()], corpus_of(**FOUR_PARAGRAPHS))
        path = tmp_path / "gold.txt"
        write_cluster_gold(bench.cluster_gold, path)
        assert read_cluster_gold(path).labels == bench.cluster_gold.labels

    def test_gold_articles_roundtrip(self, tmp_path):
        gold = {"q1": "line one\n\nline two", "q2": "x"}
        path = tmp_path / "gold.jsonl"
        write_gold_articles(gold, path)
        assert read_gold_articles(path) == gold

    def test_label_count(self, mini_benchmark):
        gold = mini_benchmark.cluster_gold
        assert gold.label_count("pg01") == len(set(gold.labels["pg01"].values()))
        with pytest.raises(DataError, match="no cluster gold"):
            gold.label_count("nope")
