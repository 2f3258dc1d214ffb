"""End-to-end orchestration: single-query runs, the manual oracle mode,
and the full experiment matrix with component-wise and system-wise
evaluation.

The matrix protocol: split queries into train/test with a fixed seed,
train the query-specific metric on the train split, then evaluate
retrieval (MAP), clustering of gold-relevant paragraphs (ARI), and
generated articles (ROUGE against gold text) on the test split. The
baseline system pairs the best-MAP retrieval with the best-ARI
clustering; other rows get significance marks against it. All outputs
are written atomically and listed in a manifest that suffices to
reproduce the run byte for byte.
"""

from __future__ import annotations

import logging
import platform
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

import matplotlib
import numpy

from . import __version__
from .benchmark import (
    Benchmark,
    ClusterGold,
    Qrels,
    derive_benchmark,
    load_outlines,
    read_qrels,
)
from .clustering import Clustering, format_cluster_lines, hac_cluster, true_k
from .corpus import Corpus, Query, ingest_corpus
from .errors import ArticleGenError, DataError, StageError, UsageError
from .fileio import dump_json, write_text_atomic
from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_B,
    MetricReport,
    adjusted_rand_index,
    average_precision,
)
from .providers import NativeSummarizer, RemoteEmbedder, RemoteSummarizer, Summarizer
from .report import EvaluationMatrix, evaluation_matrix, render_figures
from .retrieval import (
    DEFAULT_TOP_K,
    InvertedIndex,
    RankedEntry,
    Ranking,
    RETRIEVAL_METHODS,
    build_index,
    format_run_lines,
    retrieve,
)
from .similarity import (
    CLUSTERING_METHODS,
    EmbeddingStore,
    QSMetricModel,
    load_embeddings,
    pairwise_similarity_fn,
    save_metric_model,
    train_qs_metric,
)
from .summarize import (
    GeneratedArticle,
    SummarizeConfig,
    assemble_article,
    write_articles,
)

logger = logging.getLogger("articlegen")

DEFAULT_SEEDS: dict[str, int] = {
    "qs": 13,
    "split": 5,
    "louvain": 11,
    "manual": 17,
    "bootstrap": 7,
}
MANUAL_TAG = "manual"
DEFAULT_TRAIN_FRACTION = 0.5

T = TypeVar("T")


@dataclass(frozen=True)
class RunConfig:
    corpus_path: str
    outlines_path: str
    embeddings_path: str
    output_dir: str = "out"
    manual_qrels_path: str | None = None
    k: int = DEFAULT_TOP_K
    retrieval_methods: tuple[str, ...] = RETRIEVAL_METHODS
    clustering_methods: tuple[str, ...] = CLUSTERING_METHODS
    summarizer_endpoint: str | None = None
    embedder_endpoint: str | None = None
    max_sentences: int = 2
    tau: float = 0.35
    length: str = "long"
    gamma: float | None = None
    min_subtopics: int = 2
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    epochs: int = 20
    lr: float = 0.05
    b_resamples: int = DEFAULT_BOOTSTRAP_B
    alpha: float = DEFAULT_ALPHA
    seeds: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_SEEDS))
    jobs: int = 1
    keep_going: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise UsageError(f"k must be >= 1, got {self.k}")
        if self.jobs < 1:
            raise UsageError(f"jobs must be >= 1, got {self.jobs}")
        if not self.retrieval_methods:
            raise UsageError("need at least one retrieval method")
        if not self.clustering_methods:
            raise UsageError("need at least one clustering method")
        for method in self.retrieval_methods:
            if method not in RETRIEVAL_METHODS:
                raise UsageError(f"unknown retrieval method {method!r}")
        for method in self.clustering_methods:
            if method not in CLUSTERING_METHODS:
                raise UsageError(f"unknown clustering method {method!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise UsageError(f"train fraction must be in (0, 1), got {self.train_fraction}")
        missing = set(DEFAULT_SEEDS) - set(self.seeds)
        if missing:
            raise UsageError(f"seeds missing entries: {sorted(missing)}")

    def manifest_config(self) -> dict:
        """Config as recorded in the manifest. The output directory stays
        out so two runs of one config into different places match."""
        record = asdict(self)
        del record["output_dir"]
        del record["seeds"]
        record["retrieval_methods"] = list(self.retrieval_methods)
        record["clustering_methods"] = list(self.clustering_methods)
        return record

    @classmethod
    def from_manifest(cls, manifest: dict, output_dir: str) -> "RunConfig":
        try:
            config = dict(manifest["config"])
            seeds = dict(manifest["seeds"])
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed manifest: {exc}") from exc
        config["retrieval_methods"] = tuple(config["retrieval_methods"])
        config["clustering_methods"] = tuple(config["clustering_methods"])
        return cls(output_dir=output_dir, seeds=seeds, **config)


def split_queries(
    query_ids: Iterable[str], fraction: float, seed: int
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Disjoint train/test id sets: seeded shuffle of the sorted ids,
    first `fraction` share to train."""
    ids = sorted(query_ids)
    if len(ids) < 2:
        raise DataError(f"need at least 2 queries to split, got {len(ids)}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_train = int(len(ids) * fraction)
    n_train = max(1, min(n_train, len(ids) - 1))
    return tuple(sorted(ids[:n_train])), tuple(sorted(ids[n_train:]))


@dataclass
class ExperimentContext:
    """Shared read-only state for a run: everything loaded, trained, and
    split once up front."""

    config: RunConfig
    corpus: Corpus
    benchmark: Benchmark
    index: InvertedIndex
    store: EmbeddingStore
    metric_models: dict[str, QSMetricModel]
    summarizer: Summarizer
    embedder: RemoteEmbedder | None
    manual_qrels: Qrels | None
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]

    def query(self, query_id: str) -> Query:
        for query in self.benchmark.queries:
            if query.id == query_id:
                return query
        raise DataError(f"query {query_id!r} not in the benchmark")

    def summarize_config(self) -> SummarizeConfig:
        return SummarizeConfig(
            max_sentences=self.config.max_sentences,
            tau=self.config.tau,
            length=self.config.length,
            gamma=self.config.gamma,
            louvain_seed=self.config.seeds["louvain"],
        )


def _needed_query_models(clustering_methods: Sequence[str]) -> list[str]:
    return sorted(
        {m.split("-", 1)[1] for m in clustering_methods if m.startswith("qs3m-")}
    )


def build_context(config: RunConfig) -> ExperimentContext:
    corpus = ingest_corpus(config.corpus_path)
    outlines = load_outlines(config.outlines_path)
    benchmark = derive_benchmark(outlines, corpus, min_subtopics=config.min_subtopics)
    if not benchmark.queries:
        raise DataError("benchmark derivation produced no usable queries")
    index = build_index(corpus)
    store = load_embeddings(config.embeddings_path)
    train_ids, test_ids = split_queries(
        (q.id for q in benchmark.queries), config.train_fraction, config.seeds["split"]
    )
    assert not set(train_ids) & set(test_ids)

    train_gold = ClusterGold(
        labels={
            qid: dict(benchmark.cluster_gold.labels[qid])
            for qid in train_ids
            if qid in benchmark.cluster_gold.labels
        }
    )
    train_queries = [q for q in benchmark.queries if q.id in set(train_ids)]
    metric_models: dict[str, QSMetricModel] = {}
    for variant in _needed_query_models(config.clustering_methods):
        metric_models[variant] = train_qs_metric(
            store,
            train_gold,
            train_queries,
            variant,  # type: ignore[arg-type]
            epochs=config.epochs,
            lr=config.lr,
            seed=config.seeds["qs"],
        )

    summarizer: Summarizer
    if config.summarizer_endpoint:
        summarizer = RemoteSummarizer(endpoint=config.summarizer_endpoint)
    else:
        summarizer = NativeSummarizer()
    embedder = (
        RemoteEmbedder(endpoint=config.embedder_endpoint)
        if config.embedder_endpoint
        else None
    )
    manual_qrels = (
        read_qrels(config.manual_qrels_path) if config.manual_qrels_path else None
    )
    return ExperimentContext(
        config=config,
        corpus=corpus,
        benchmark=benchmark,
        index=index,
        store=store,
        metric_models=metric_models,
        summarizer=summarizer,
        embedder=embedder,
        manual_qrels=manual_qrels,
        train_ids=train_ids,
        test_ids=test_ids,
    )


def _staged(stage: str, query_id: str, fn: Callable[[], T]) -> T:
    try:
        return fn()
    except StageError:
        raise
    except ArticleGenError as exc:
        raise StageError(stage, query_id, exc) from exc


@dataclass(frozen=True)
class PipelineResult:
    ranking: Ranking
    clustering: Clustering | None
    article: GeneratedArticle


def _empty_article(query_id: str, system: str, method: dict[str, str]) -> GeneratedArticle:
    return GeneratedArticle(
        query_id=query_id,
        sections=(),
        method={**method, "system": system, "empty": "no-candidates"},
    )


def run_pipeline(
    ctx: ExperimentContext,
    query: Query,
    retrieval_method: str,
    clustering_method: str,
) -> PipelineResult:
    """Retrieve, cluster into the gold number of subtopics, summarize."""
    system = f"{retrieval_method}+{clustering_method}"
    ranking = _staged(
        "retrieve", query.id, lambda: retrieve(ctx.index, query, retrieval_method, ctx.config.k)
    )
    if len(ranking) == 0:
        article = _empty_article(
            query.id,
            system,
            {
                "retrieval": retrieval_method,
                "clustering": clustering_method,
                "summarizer": ctx.summarizer.tag,
                "length": ctx.config.length,
            },
        )
        return PipelineResult(ranking=ranking, clustering=None, article=article)

    candidates = list(ranking.doc_ids())
    k_gold = true_k(query, ctx.benchmark.cluster_gold)
    k_eff = min(k_gold, len(candidates))
    if k_eff < k_gold:
        logger.warning(
            "query %s: only %d candidates, clamping K from %d",
            query.id,
            len(candidates),
            k_gold,
        )

    def _cluster() -> Clustering:
        sim = pairwise_similarity_fn(
            clustering_method, ctx.store, query, candidates, ctx.metric_models
        )
        return hac_cluster(candidates, sim, k_eff, query.id)

    clustering = _staged("cluster", query.id, _cluster)
    article = _staged(
        "summarize",
        query.id,
        lambda: assemble_article(
            query,
            clustering,
            ranking,
            ctx.corpus,
            ctx.summarizer,
            ctx.summarize_config(),
            ctx.embedder,
            clustering_tag=clustering_method,
        ),
    )
    article = replace(article, method={**article.method, "system": system})
    return PipelineResult(ranking=ranking, clustering=clustering, article=article)


def run_manual(ctx: ExperimentContext, query: Query, seed: int) -> PipelineResult:
    """Oracle mode: clusters come from section-level manual assessments.

    A paragraph judged for several sections goes to its highest-grade
    section; grade ties are broken uniformly at random under a per-query
    seed. The pseudo-ranking orders paragraphs by grade, then id.
    """
    if ctx.manual_qrels is None:
        raise DataError("manual mode requires section-level qrels")
    per_pid: dict[str, list[tuple[int, str]]] = {}
    for subtopic, grades in ctx.manual_qrels.for_query(query.id).items():
        if subtopic is None:
            continue
        for pid, grade in grades.items():
            if grade > 0:
                per_pid.setdefault(pid, []).append((grade, subtopic))
    if not per_pid:
        article = _empty_article(
            query.id,
            MANUAL_TAG,
            {
                "retrieval": MANUAL_TAG,
                "clustering": "manual-sections",
                "summarizer": ctx.summarizer.tag,
                "length": ctx.config.length,
            },
        )
        article = replace(
            article, method={**article.method, "empty": "no-positive-assessments"}
        )
        return PipelineResult(
            ranking=Ranking(query_id=query.id, entries=(), method=MANUAL_TAG),
            clustering=None,
            article=article,
        )

    missing = sorted(pid for pid in per_pid if pid not in ctx.corpus)
    if missing:
        raise DataError(f"query {query.id!r}: assessed paragraphs not in corpus: {missing}")

    rng = random.Random(f"{seed}:{query.id}")
    assignment: dict[str, tuple[str, int]] = {}
    for pid in sorted(per_pid):
        best = max(grade for grade, _ in per_pid[pid])
        tied = sorted(subtopic for grade, subtopic in per_pid[pid] if grade == best)
        choice = tied[0] if len(tied) == 1 else rng.choice(tied)
        assignment[pid] = (choice, best)

    ordered = sorted(assignment, key=lambda pid: (-assignment[pid][1], pid))
    entries = tuple(
        RankedEntry(doc_id=pid, score=float(assignment[pid][1]), rank=i)
        for i, pid in enumerate(ordered, start=1)
    )
    ranking = Ranking(query_id=query.id, entries=entries, method=MANUAL_TAG)

    slugs = sorted({subtopic for subtopic, _ in assignment.values()})
    indices = {slug: i for i, slug in enumerate(slugs)}
    clustering = Clustering(
        query_id=query.id,
        assignments={pid: indices[assignment[pid][0]] for pid in assignment},
        k=len(slugs),
    )
    article = _staged(
        "summarize",
        query.id,
        lambda: assemble_article(
            query,
            clustering,
            ranking,
            ctx.corpus,
            ctx.summarizer,
            ctx.summarize_config(),
            ctx.embedder,
            clustering_tag="manual-sections",
        ),
    )
    article = replace(article, method={**article.method, "system": MANUAL_TAG})
    return PipelineResult(ranking=ranking, clustering=clustering, article=article)


def _map_queries(
    ctx: ExperimentContext, query_ids: Sequence[str], fn: Callable[[str], T]
) -> list[T]:
    if ctx.config.jobs == 1 or len(query_ids) <= 1:
        return [fn(qid) for qid in query_ids]
    with ThreadPoolExecutor(max_workers=ctx.config.jobs) as pool:
        return list(pool.map(fn, query_ids))


def retrieval_reports(ctx: ExperimentContext) -> dict[str, dict[str, Ranking]]:
    """Rank the test queries once per retrieval method."""
    out: dict[str, dict[str, Ranking]] = {}
    for method in ctx.config.retrieval_methods:
        def _one(qid: str) -> tuple[str, Ranking]:
            query = ctx.query(qid)
            return qid, _staged(
                "retrieve", qid, lambda: retrieve(ctx.index, query, method, ctx.config.k)
            )

        out[method] = dict(_map_queries(ctx, ctx.test_ids, _one))
    return out


def score_retrieval(
    ctx: ExperimentContext, rankings: Mapping[str, Mapping[str, Ranking]]
) -> dict[str, MetricReport]:
    reports: dict[str, MetricReport] = {}
    for method, per_query in rankings.items():
        values: dict[str, float] = {}
        skipped: list[str] = []
        for qid in ctx.test_ids:
            relevant = ctx.benchmark.qrels.relevant(qid)
            if not relevant:
                skipped.append(qid)
                continue
            values[qid] = average_precision(per_query[qid], relevant)
        reports[method] = MetricReport(
            metric="map", per_query=values, skipped=tuple(skipped)
        )
    return reports


def clustering_reports(
    ctx: ExperimentContext,
) -> tuple[dict[str, MetricReport], dict[str, dict[str, Clustering]]]:
    """Cluster each test query's gold-relevant paragraphs per method and
    score against the gold section labels."""
    reports: dict[str, MetricReport] = {}
    clusterings: dict[str, dict[str, Clustering]] = {}
    for method in ctx.config.clustering_methods:
        def _one(qid: str) -> tuple[str, Clustering | None]:
            gold = ctx.benchmark.cluster_gold.labels.get(qid)
            if not gold:
                return qid, None
            query = ctx.query(qid)
            candidates = sorted(gold)
            k_eff = min(len(set(gold.values())), len(candidates))

            def _cluster() -> Clustering:
                sim = pairwise_similarity_fn(
                    method, ctx.store, query, candidates, ctx.metric_models
                )
                return hac_cluster(candidates, sim, k_eff, qid)

            return qid, _staged("cluster", qid, _cluster)

        results = dict(_map_queries(ctx, ctx.test_ids, _one))
        values: dict[str, float] = {}
        skipped: list[str] = []
        per_query: dict[str, Clustering] = {}
        for qid in ctx.test_ids:
            clustering = results[qid]
            if clustering is None:
                skipped.append(qid)
                continue
            per_query[qid] = clustering
            values[qid] = adjusted_rand_index(
                clustering.assignments, ctx.benchmark.cluster_gold.labels[qid]
            )
        reports[method] = MetricReport(
            metric="ari", per_query=values, skipped=tuple(skipped)
        )
        clusterings[method] = per_query
    return reports, clusterings


def pick_baseline(
    retrieval: Mapping[str, MetricReport],
    clustering: Mapping[str, MetricReport],
    retrieval_order: Sequence[str],
    clustering_order: Sequence[str],
) -> str:
    """Best-MAP retrieval paired with best-ARI clustering; ties keep the
    earlier method in configured order."""
    best_r = max(retrieval_order, key=lambda m: (retrieval[m].aggregate, -retrieval_order.index(m)))
    best_c = max(clustering_order, key=lambda m: (clustering[m].aggregate, -clustering_order.index(m)))
    return f"{best_r}+{best_c}"


@dataclass(frozen=True)
class QueryFailure:
    system: str
    query_id: str
    stage: str
    error: str

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "query_id": self.query_id,
            "stage": self.stage,
            "error": self.error,
        }


@dataclass
class MatrixResult:
    matrix: EvaluationMatrix
    retrieval: dict[str, MetricReport]
    clustering: dict[str, MetricReport]
    baseline: str
    failures: list[QueryFailure]
    outputs: list[Path]
    manifest_path: Path


def _system_rows(
    ctx: ExperimentContext,
    rankings: Mapping[str, Mapping[str, Ranking]],
    failures: list[QueryFailure],
) -> dict[str, list[PipelineResult]]:
    """Run every (retrieval, clustering) combination plus manual over the
    test queries. With keep_going, failed queries are recorded and the
    row continues without them."""
    rows: dict[str, list[PipelineResult]] = {}
    for retrieval_method in ctx.config.retrieval_methods:
        for clustering_method in ctx.config.clustering_methods:
            system = f"{retrieval_method}+{clustering_method}"

            def _one(qid: str) -> PipelineResult | QueryFailure:
                try:
                    return run_pipeline(
                        ctx, ctx.query(qid), retrieval_method, clustering_method
                    )
                except ArticleGenError as exc:
                    if not ctx.config.keep_going:
                        raise
                    stage = exc.stage if isinstance(exc, StageError) else "pipeline"
                    cause = exc.cause if isinstance(exc, StageError) else exc
                    return QueryFailure(
                        system=system, query_id=qid, stage=stage, error=str(cause)
                    )

            results = _map_queries(ctx, ctx.test_ids, _one)
            kept: list[PipelineResult] = []
            for item in results:
                if isinstance(item, QueryFailure):
                    failures.append(item)
                else:
                    kept.append(item)
            rows[system] = kept

    if ctx.manual_qrels is not None:
        def _one_manual(qid: str) -> PipelineResult | QueryFailure:
            try:
                return run_manual(ctx, ctx.query(qid), ctx.config.seeds["manual"])
            except ArticleGenError as exc:
                if not ctx.config.keep_going:
                    raise
                stage = exc.stage if isinstance(exc, StageError) else "manual"
                cause = exc.cause if isinstance(exc, StageError) else exc
                return QueryFailure(
                    system=MANUAL_TAG, query_id=qid, stage=stage, error=str(cause)
                )

        results = _map_queries(ctx, ctx.test_ids, _one_manual)
        kept = []
        for item in results:
            if isinstance(item, QueryFailure):
                failures.append(item)
            else:
                kept.append(item)
        rows[MANUAL_TAG] = kept
    return rows


def _write(path: Path, text: str, outputs: list[Path]) -> None:
    write_text_atomic(path, text)
    outputs.append(path)


def run_matrix(config: RunConfig) -> MatrixResult:
    """Run the full experiment and write all artifacts under the output
    directory. Any failure (without keep_going) removes partial outputs."""
    ctx = build_context(config)
    out_dir = Path(config.output_dir)
    outputs: list[Path] = []
    try:
        return _run_matrix_inner(ctx, out_dir, outputs)
    except BaseException:
        for path in outputs:
            path.unlink(missing_ok=True)
        raise


def _run_matrix_inner(
    ctx: ExperimentContext, out_dir: Path, outputs: list[Path]
) -> MatrixResult:
    config = ctx.config
    for sub in ("runs", "clusters/component", "clusters/system", "articles", "models", "reports"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)

    rankings = retrieval_reports(ctx)
    for method, per_query in rankings.items():
        text = format_run_lines(per_query[qid] for qid in ctx.test_ids)
        _write(out_dir / "runs" / f"{method}.run", text, outputs)

    retrieval_scores = score_retrieval(ctx, rankings)
    _write(
        out_dir / "reports" / "retrieval_map.json",
        dump_json({m: r.to_json() for m, r in retrieval_scores.items()}),
        outputs,
    )

    clustering_scores, component_clusterings = clustering_reports(ctx)
    for method, per_query in component_clusterings.items():
        lines = []
        for qid in sorted(per_query):
            lines.extend(format_cluster_lines(per_query[qid]))
        _write(
            out_dir / "clusters" / "component" / f"{method}.txt",
            "".join(f"{l}\n" for l in lines),
            outputs,
        )
    _write(
        out_dir / "reports" / "clustering_ari.json",
        dump_json({m: r.to_json() for m, r in clustering_scores.items()}),
        outputs,
    )

    for variant, model in sorted(ctx.metric_models.items()):
        path = out_dir / "models" / f"qs-{variant}.json"
        save_metric_model(model, path)
        outputs.append(path)

    baseline = pick_baseline(
        retrieval_scores,
        clustering_scores,
        config.retrieval_methods,
        config.clustering_methods,
    )

    failures: list[QueryFailure] = []
    rows = _system_rows(ctx, rankings, failures)
    articles: list[GeneratedArticle] = []
    for system, results in rows.items():
        write_articles((r.article for r in results), out_dir / "articles" / f"{system}.jsonl")
        outputs.append(out_dir / "articles" / f"{system}.jsonl")
        cluster_lines: list[str] = []
        for result in results:
            if result.clustering is not None:
                cluster_lines.extend(format_cluster_lines(result.clustering))
        if system != MANUAL_TAG:
            _write(
                out_dir / "clusters" / "system" / f"{system}.txt",
                "".join(f"{l}\n" for l in cluster_lines),
                outputs,
            )
        articles.extend(r.article for r in results)

    # Articles with zero sections cannot be scored; drop them from the
    # matrix but keep them in the emitted article files.
    scorable = [a for a in articles if a.sections]
    matrix = evaluation_matrix(
        scorable,
        ctx.benchmark.gold_articles,
        baseline,
        b_resamples=config.b_resamples,
        seed=config.seeds["bootstrap"],
        alpha=config.alpha,
    )
    _write(out_dir / "reports" / "matrix.csv", matrix.to_csv(), outputs)
    _write(out_dir / "reports" / "matrix.txt", matrix.to_text(), outputs)
    _write(out_dir / "reports" / "matrix.json", dump_json(matrix.to_json()), outputs)
    if config.keep_going:
        _write(
            out_dir / "reports" / "failures.json",
            dump_json([f.to_json() for f in failures]),
            outputs,
        )

    outputs.extend(
        render_figures(out_dir / "reports", retrieval_scores, clustering_scores, matrix)
    )

    manifest = {
        "config": config.manifest_config(),
        "seeds": {k: config.seeds[k] for k in sorted(config.seeds)},
        "versions": {
            "articlegen": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "matplotlib": matplotlib.__version__,
        },
        "outputs": sorted(str(p.relative_to(out_dir)) for p in outputs),
    }
    manifest_path = out_dir / "manifest.json"
    write_text_atomic(manifest_path, dump_json(manifest))
    return MatrixResult(
        matrix=matrix,
        retrieval=retrieval_scores,
        clustering=clustering_scores,
        baseline=baseline,
        failures=failures,
        outputs=outputs,
        manifest_path=manifest_path,
    )
