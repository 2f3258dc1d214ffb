"""Command-line interface.

Subcommands cover each pipeline stage plus the full experiment matrix.
Every option can also come from a config file (--config): one
`key = value` pair per line, `#` comments, comma-separated lists.
Explicit command-line flags win over config-file values.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from .benchmark import (
    coordination_check,
    derive_benchmark,
    load_outlines,
    read_cluster_gold,
    read_gold_articles,
    read_qrels,
    write_cluster_gold,
    write_gold_articles,
    write_qrels,
)
from .clustering import format_cluster_lines, hac_cluster, read_cluster_lines
from .corpus import ingest_corpus, load_queries, write_corpus, write_queries
from .errors import DataError, UsageError, exit_code_for
from .fileio import dump_json, write_text_atomic
from .metrics import (
    MetricReport,
    adjusted_rand_index,
    average_precision,
    rouge_n,
)
from .pipeline import DEFAULT_SEEDS, RunConfig, run_matrix
from .providers import NativeSummarizer, RemoteEmbedder, RemoteSummarizer
from .retrieval import (
    DEFAULT_B,
    DEFAULT_K1,
    DEFAULT_TOP_K,
    RETRIEVAL_METHODS,
    build_index,
    load_index,
    read_run_file,
    retrieve,
    save_index,
    write_run_file,
)
from .similarity import (
    CLUSTERING_METHODS,
    QUERY_MODELS,
    load_embeddings,
    load_metric_model,
    pairwise_similarity_fn,
    save_metric_model,
    train_qs_metric,
)
from .summarize import (
    SummarizeConfig,
    assemble_article,
    read_articles,
    write_articles,
)

logger = logging.getLogger("articlegen")


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; this CLI needs 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat `key = value` lines; `#` comments; keys use - or _ freely."""
    values: dict[str, str] = {}
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise UsageError(f"{path}:{lineno}: empty key")
        if key in values:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _as_bool(value: str, key: str) -> bool:
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key!r}: expected a boolean, got {value!r}")


def _convert(value: str, kind: str, key: str) -> Any:
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            return _as_bool(value, key)
        if kind == "list":
            return tuple(part.strip() for part in value.split(",") if part.strip())
        return value
    except ValueError as exc:
        raise UsageError(f"config key {key!r}: expected {kind}, got {value!r}") from exc


def _resolve(args: argparse.Namespace, file_values: dict[str, str]) -> None:
    """Fill every dest still None from the config file, else its declared
    default; reject config keys the subcommand does not know."""
    kinds: dict[str, tuple[str, Any]] = getattr(args, "_param_kinds", {})
    known = set(kinds)
    unknown = set(file_values) - known
    if unknown:
        raise UsageError(f"config keys not accepted by this subcommand: {sorted(unknown)}")
    for key, (kind, default) in kinds.items():
        if getattr(args, key, None) is None:
            if key in file_values:
                setattr(args, key, _convert(file_values[key], kind, key))
            else:
                setattr(args, key, default)


class _Sub:
    """Wrapper that records each option's type and default so config-file
    values can be merged after parsing."""

    def __init__(self, parser: argparse.ArgumentParser):
        self.parser = parser
        self.kinds: dict[str, tuple[str, Any]] = {}

    def opt(
        self,
        flag: str,
        kind: str = "str",
        default: Any = None,
        required: bool = False,
        help: str = "",
        choices: Sequence[str] | None = None,
    ) -> None:
        dest = flag.lstrip("-").replace("-", "_")
        self.kinds[dest] = (kind, default)
        kwargs: dict[str, Any] = {"dest": dest, "default": None, "help": help}
        if kind == "bool":
            kwargs["action"] = "store_true"
        elif kind == "list":
            kwargs["type"] = lambda s: tuple(p.strip() for p in s.split(",") if p.strip())
        elif kind == "int":
            kwargs["type"] = int
        elif kind == "float":
            kwargs["type"] = float
        if choices is not None and kind == "str":
            kwargs["choices"] = list(choices)
        self.parser.add_argument(flag, **kwargs)
        if required:
            self.kinds[dest] = (kind, _REQUIRED)

    def finish(self) -> None:
        self.parser.set_defaults(_param_kinds=self.kinds)


_REQUIRED = object()


def _require(args: argparse.Namespace) -> None:
    kinds: dict[str, tuple[str, Any]] = getattr(args, "_param_kinds", {})
    missing = [k for k in kinds if getattr(args, k) is _REQUIRED]
    for key in missing:
        setattr(args, key, None)
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in sorted(missing))
        raise UsageError(f"missing required options: {flags}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="articlegen",
        description=(
            "Query-specific article generation: retrieve, cluster, summarize, "
            "and evaluate against an outline-derived benchmark."
        ),
    )
    parser.add_argument("--config", default=None, help="flat key=value config file")
    parser.add_argument(
        "--verbose", action="store_true", help="log progress details to stderr"
    )
    subs = parser.add_subparsers(dest="command", metavar="command")

    s = _Sub(subs.add_parser("ingest", help="validate and normalize a paragraph corpus"))
    s.opt("--corpus", required=True, help="input paragraph JSONL")
    s.opt("--out", required=True, help="normalized corpus JSONL to write")
    s.opt("--keep-duplicates", kind="bool", default=False, help="keep near-duplicate texts")
    s.finish()

    s = _Sub(
        subs.add_parser(
            "derive-benchmark",
            help="derive queries, qrels, cluster gold, and gold articles from outlines",
        )
    )
    s.opt("--corpus", required=True)
    s.opt("--outlines", required=True, help="article outline JSONL")
    s.opt("--out-dir", required=True)
    s.opt("--min-subtopics", kind="int", default=2)
    s.finish()

    s = _Sub(subs.add_parser("index", help="build and save a BM25 index snapshot"))
    s.opt("--corpus", required=True)
    s.opt("--out", required=True)
    s.opt("--k1", kind="float", default=DEFAULT_K1)
    s.opt("--b", kind="float", default=DEFAULT_B)
    s.finish()

    s = _Sub(subs.add_parser("retrieve", help="rank paragraphs for each query"))
    s.opt("--corpus", help="corpus JSONL (builds the index on the fly)")
    s.opt("--index", help="index snapshot from the index subcommand")
    s.opt("--queries", required=True, help="query JSONL")
    s.opt("--method", default=RETRIEVAL_METHODS[0], choices=RETRIEVAL_METHODS)
    s.opt("--k", kind="int", default=DEFAULT_TOP_K)
    s.opt("--out", required=True, help="run file to write")
    s.finish()

    s = _Sub(subs.add_parser("train-metric", help="train the query-specific pair metric"))
    s.opt("--embeddings", required=True)
    s.opt("--cluster-gold", required=True)
    s.opt("--queries", required=True)
    s.opt("--model", default="title", choices=QUERY_MODELS, help="query model variant")
    s.opt("--epochs", kind="int", default=20)
    s.opt("--lr", kind="float", default=0.05)
    s.opt("--seed", kind="int", default=DEFAULT_SEEDS["qs"])
    s.opt("--out", required=True, help="model JSON to write")
    s.finish()

    s = _Sub(subs.add_parser("cluster", help="cluster ranked paragraphs per query"))
    s.opt("--embeddings", required=True)
    s.opt("--queries", required=True)
    s.opt("--run", required=True, help="run file with the candidates")
    s.opt("--cluster-gold", required=True, help="gold labels supplying K per query")
    s.opt("--method", default=CLUSTERING_METHODS[0], choices=CLUSTERING_METHODS)
    s.opt("--metric-model", help="trained model JSON (qs3m methods)")
    s.opt("--out", required=True, help="cluster assignment file to write")
    s.finish()

    s = _Sub(subs.add_parser("summarize", help="turn clusters into an article per query"))
    s.opt("--corpus", required=True)
    s.opt("--queries", required=True)
    s.opt("--run", required=True)
    s.opt("--clusters", required=True)
    s.opt("--out", required=True, help="article JSONL to write")
    s.opt("--summarizer-endpoint", help="remote summarizer URL (default: native)")
    s.opt("--embedder-endpoint", help="remote embedder URL for summary similarity")
    s.opt("--max-sentences", kind="int", default=2)
    s.opt("--tau", kind="float", default=0.35)
    s.opt("--length", default="long", choices=("short", "long"))
    s.opt("--gamma", kind="float", help="explicit redundancy resolution, overrides --length")
    s.opt("--louvain-seed", kind="int", default=DEFAULT_SEEDS["louvain"])
    s.finish()

    s = _Sub(subs.add_parser("evaluate", help="score runs, clusterings, or articles"))
    s.opt("--metric", required=True, choices=("map", "ari", "rouge"))
    s.opt("--run", help="run file (map)")
    s.opt("--qrels", help="qrels file (map)")
    s.opt("--clusters", help="cluster assignment file (ari)")
    s.opt("--cluster-gold", help="gold labels (ari)")
    s.opt("--articles", help="article JSONL (rouge)")
    s.opt("--gold-articles", help="gold article JSONL (rouge)")
    s.opt("--out", help="write the JSON report here instead of stdout")
    s.finish()

    s = _Sub(subs.add_parser("run-matrix", help="run the full experiment matrix"))
    s.opt("--manifest", help="re-run from a previous manifest (only --out-dir may accompany)")
    s.opt("--corpus")
    s.opt("--outlines")
    s.opt("--embeddings")
    s.opt("--out-dir", default="out")
    s.opt("--manual-qrels", help="section-level graded qrels enabling the manual row")
    s.opt("--k", kind="int", default=DEFAULT_TOP_K)
    s.opt("--retrieval-methods", kind="list", default=RETRIEVAL_METHODS)
    s.opt("--clustering-methods", kind="list", default=CLUSTERING_METHODS)
    s.opt("--summarizer-endpoint")
    s.opt("--embedder-endpoint")
    s.opt("--max-sentences", kind="int", default=2)
    s.opt("--tau", kind="float", default=0.35)
    s.opt("--length", default="long", choices=("short", "long"))
    s.opt("--gamma", kind="float")
    s.opt("--min-subtopics", kind="int", default=2)
    s.opt("--train-fraction", kind="float", default=0.5)
    s.opt("--epochs", kind="int", default=20)
    s.opt("--lr", kind="float", default=0.05)
    s.opt("--b-resamples", kind="int", default=10_000)
    s.opt("--alpha", kind="float", default=0.05)
    s.opt("--seed-qs", kind="int", default=DEFAULT_SEEDS["qs"])
    s.opt("--seed-split", kind="int", default=DEFAULT_SEEDS["split"])
    s.opt("--seed-louvain", kind="int", default=DEFAULT_SEEDS["louvain"])
    s.opt("--seed-manual", kind="int", default=DEFAULT_SEEDS["manual"])
    s.opt("--seed-bootstrap", kind="int", default=DEFAULT_SEEDS["bootstrap"])
    s.opt("--jobs", kind="int", default=1)
    s.opt("--keep-going", kind="bool", default=False)
    s.finish()

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.corpus, dedup=not args.keep_duplicates)
    write_corpus(corpus, args.out)
    print(f"wrote {corpus.n} paragraphs to {args.out}")
    return 0


def _cmd_derive_benchmark(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.corpus)
    outlines = load_outlines(args.outlines)
    benchmark = derive_benchmark(outlines, corpus, min_subtopics=args.min_subtopics)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_queries(benchmark.queries, out_dir / "queries.jsonl")
    write_qrels(benchmark.qrels, out_dir / "qrels.txt")
    write_cluster_gold(benchmark.cluster_gold, out_dir / "cluster_gold.txt")
    write_gold_articles(benchmark.gold_articles, out_dir / "gold_articles.jsonl")
    violations = coordination_check(
        benchmark.queries,
        benchmark.qrels,
        benchmark.cluster_gold,
        benchmark.gold_articles,
        corpus=corpus,
    )
    for violation in violations:
        print(f"coordination: {violation.kind}: {violation.detail}", file=sys.stderr)
    print(
        f"derived {len(benchmark.queries)} queries "
        f"({len(benchmark.skipped_pages)} pages skipped, "
        f"{len(violations)} coordination violations) into {out_dir}"
    )
    return 0


def _cmd_index(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.corpus)
    index = build_index(corpus, k1=args.k1, b=args.b)
    save_index(index, args.out)
    print(f"indexed {index.n_docs} paragraphs, {len(index.postings)} terms -> {args.out}")
    return 0


def _cmd_retrieve(args: argparse.Namespace) -> int:
    if bool(args.corpus) == bool(args.index):
        raise UsageError("give exactly one of --corpus or --index")
    index = load_index(args.index) if args.index else build_index(ingest_corpus(args.corpus))
    queries = load_queries(args.queries)
    rankings = [retrieve(index, query, args.method, args.k) for query in queries]
    write_run_file(rankings, args.out)
    print(f"wrote {sum(len(r) for r in rankings)} entries for {len(queries)} queries to {args.out}")
    return 0


def _cmd_train_metric(args: argparse.Namespace) -> int:
    store = load_embeddings(args.embeddings)
    gold = read_cluster_gold(args.cluster_gold)
    queries = load_queries(args.queries)
    model = train_qs_metric(
        store, gold, queries, args.model, epochs=args.epochs, lr=args.lr, seed=args.seed
    )
    save_metric_model(model, args.out)
    print(
        f"trained {args.model} metric: loss {model.loss_history[0]:.4f} -> "
        f"{model.loss_history[-1]:.4f} over {args.epochs} epochs -> {args.out}"
    )
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    store = load_embeddings(args.embeddings)
    queries = {q.id: q for q in load_queries(args.queries)}
    gold = read_cluster_gold(args.cluster_gold)
    rankings = read_run_file(args.run)
    metric_models = None
    if args.method.startswith("qs3m-"):
        if not args.metric_model:
            raise UsageError(f"method {args.method} needs --metric-model")
        model = load_metric_model(args.metric_model)
        variant = args.method.split("-", 1)[1]
        if model.query_model != variant:
            raise DataError(
                f"model was trained for {model.query_model!r}, not {variant!r}"
            )
        metric_models = {variant: model}
    lines: list[str] = []
    for ranking in rankings:
        query = queries.get(ranking.query_id)
        if query is None:
            raise DataError(f"run file names unknown query {ranking.query_id!r}")
        candidates = list(ranking.doc_ids())
        if not candidates:
            continue
        k = min(gold.label_count(query.id), len(candidates))
        sim = pairwise_similarity_fn(args.method, store, query, candidates, metric_models)
        clustering = hac_cluster(candidates, sim, k, query.id)
        lines.extend(format_cluster_lines(clustering))
    write_text_atomic(args.out, "".join(f"{line}\n" for line in lines))
    print(f"clustered {len(rankings)} queries with {args.method} -> {args.out}")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.corpus)
    queries = {q.id: q for q in load_queries(args.queries)}
    rankings = {r.query_id: r for r in read_run_file(args.run)}
    with open(args.clusters, "r", encoding="utf-8") as fh:
        clusterings = read_cluster_lines(fh)
    provider = (
        RemoteSummarizer(endpoint=args.summarizer_endpoint)
        if args.summarizer_endpoint
        else NativeSummarizer()
    )
    embedder = (
        RemoteEmbedder(endpoint=args.embedder_endpoint) if args.embedder_endpoint else None
    )
    config = SummarizeConfig(
        max_sentences=args.max_sentences,
        tau=args.tau,
        length=args.length,
        gamma=args.gamma,
        louvain_seed=args.louvain_seed,
    )
    articles = []
    for qid in sorted(clusterings):
        query = queries.get(qid)
        if query is None:
            raise DataError(f"cluster file names unknown query {qid!r}")
        ranking = rankings.get(qid)
        if ranking is None:
            raise DataError(f"no ranking for query {qid!r} in {args.run}")
        articles.append(
            assemble_article(
                query,
                clusterings[qid],
                ranking,
                corpus,
                provider,
                config,
                embedder,
                clustering_tag="file",
            )
        )
    write_articles(articles, args.out)
    print(f"wrote {len(articles)} articles to {args.out}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    if args.metric == "map":
        if not args.run or not args.qrels:
            raise UsageError("map needs --run and --qrels")
        qrels = read_qrels(args.qrels)
        values: dict[str, float] = {}
        skipped: list[str] = []
        for ranking in read_run_file(args.run):
            relevant = qrels.relevant(ranking.query_id)
            if not relevant:
                skipped.append(ranking.query_id)
                continue
            values[ranking.query_id] = average_precision(ranking, relevant)
        report = MetricReport(metric="map", per_query=values, skipped=tuple(skipped))
        payload = report.to_json()
    elif args.metric == "ari":
        if not args.clusters or not args.cluster_gold:
            raise UsageError("ari needs --clusters and --cluster-gold")
        gold = read_cluster_gold(args.cluster_gold)
        with open(args.clusters, "r", encoding="utf-8") as fh:
            clusterings = read_cluster_lines(fh)
        values = {}
        for qid in sorted(clusterings):
            if qid not in gold.labels:
                raise DataError(f"no gold labels for query {qid!r}")
            values[qid] = adjusted_rand_index(
                clusterings[qid].assignments, gold.labels[qid]
            )
        report = MetricReport(metric="ari", per_query=values)
        payload = report.to_json()
    else:
        if not args.articles or not args.gold_articles:
            raise UsageError("rouge needs --articles and --gold-articles")
        gold_articles = read_gold_articles(args.gold_articles)
        per_query: dict[str, dict[str, float]] = {}
        for article in read_articles(args.articles):
            gold_text = gold_articles.get(article.query_id)
            if gold_text is None:
                raise DataError(f"no gold article for query {article.query_id!r}")
            r1 = rouge_n(article.flat_text(), gold_text, 1)
            r2 = rouge_n(article.flat_text(), gold_text, 2)
            per_query[article.query_id] = {
                "rouge1_p": r1.precision,
                "rouge1_r": r1.recall,
                "rouge1_f1": r1.f1,
                "rouge2_p": r2.precision,
                "rouge2_r": r2.recall,
                "rouge2_f1": r2.f1,
            }
        if not per_query:
            raise DataError("no articles to evaluate")
        keys = list(next(iter(per_query.values())))
        aggregate = {
            key: sum(row[key] for row in per_query.values()) / len(per_query)
            for key in keys
        }
        payload = {
            "metric": "rouge",
            "aggregate": aggregate,
            "per_query": {qid: per_query[qid] for qid in sorted(per_query)},
        }
    text = dump_json(payload)
    if args.out:
        write_text_atomic(args.out, text)
        print(f"wrote report to {args.out}")
    else:
        print(text, end="")
    return 0


_MANIFEST_ONLY = ("manifest", "out_dir")


def _cmd_run_matrix(args: argparse.Namespace) -> int:
    if args.manifest:
        kinds = getattr(args, "_param_kinds", {})
        explicit = [
            key
            for key in kinds
            if key not in _MANIFEST_ONLY and getattr(args, f"_given_{key}", False)
        ]
        if explicit:
            raise UsageError(
                "with --manifest, only --out-dir may be given "
                f"(also got: {sorted(explicit)})"
            )
        with open(args.manifest, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        config = RunConfig.from_manifest(manifest, args.out_dir)
    else:
        for key in ("corpus", "outlines", "embeddings"):
            if not getattr(args, key):
                raise UsageError(f"--{key} is required (or use --manifest)")
        config = RunConfig(
            corpus_path=args.corpus,
            outlines_path=args.outlines,
            embeddings_path=args.embeddings,
            output_dir=args.out_dir,
            manual_qrels_path=args.manual_qrels,
            k=args.k,
            retrieval_methods=tuple(args.retrieval_methods),
            clustering_methods=tuple(args.clustering_methods),
            summarizer_endpoint=args.summarizer_endpoint,
            embedder_endpoint=args.embedder_endpoint,
            max_sentences=args.max_sentences,
            tau=args.tau,
            length=args.length,
            gamma=args.gamma,
            min_subtopics=args.min_subtopics,
            train_fraction=args.train_fraction,
            epochs=args.epochs,
            lr=args.lr,
            b_resamples=args.b_resamples,
            alpha=args.alpha,
            seeds={
                "qs": args.seed_qs,
                "split": args.seed_split,
                "louvain": args.seed_louvain,
                "manual": args.seed_manual,
                "bootstrap": args.seed_bootstrap,
            },
            jobs=args.jobs,
            keep_going=args.keep_going,
        )
    result = run_matrix(config)
    print(result.matrix.to_text(), end="")
    print(f"baseline: {result.baseline}")
    if result.failures:
        print(f"{len(result.failures)} per-query failures recorded", file=sys.stderr)
    print(f"manifest: {result.manifest_path}")
    return 0


_COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "ingest": _cmd_ingest,
    "derive-benchmark": _cmd_derive_benchmark,
    "index": _cmd_index,
    "retrieve": _cmd_retrieve,
    "train-metric": _cmd_train_metric,
    "cluster": _cmd_cluster,
    "summarize": _cmd_summarize,
    "evaluate": _cmd_evaluate,
    "run-matrix": _cmd_run_matrix,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if not args.command:
            parser.print_help()
            return 1
        file_values = load_config_file(args.config) if args.config else {}
        _mark_given(args, argv)
        _resolve(args, file_values)
        _require(args)
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return 0
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # noqa: BLE001 - single exit-code boundary
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


def _mark_given(args: argparse.Namespace, argv: Sequence[str] | None) -> None:
    """Record which options appeared literally on the command line, so
    manifest re-runs can reject conflicting explicit flags."""
    tokens = list(argv) if argv is not None else sys.argv[1:]
    for key in getattr(args, "_param_kinds", {}):
        flag = "--" + key.replace("_", "-")
        given = any(tok == flag or tok.startswith(flag + "=") for tok in tokens)
        setattr(args, f"_given_{key}", given)


if __name__ == "__main__":
    sys.exit(main())
