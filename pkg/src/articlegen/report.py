"""System-wise evaluation matrix and report rendering.

Rows are system variants (retrieval+clustering combinations plus the
manual oracle), columns are ROUGE-1/2 precision, recall, and F1. Each
cell is the mean over evaluated queries; cells of non-baseline rows
carry a significance mark versus the baseline row from a paired
bootstrap. Output renderings: CSV, aligned plain text (column maxima
wrapped in **), JSON, and bar-chart figures.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import DataError
from .fileio import write_bytes_atomic
from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_B,
    DEFAULT_BOOTSTRAP_SEED,
    MetricReport,
    paired_significance,
    rouge_n,
)
from .summarize import GeneratedArticle

MATRIX_COLUMNS = (
    "rouge1_p",
    "rouge1_r",
    "rouge1_f1",
    "rouge2_p",
    "rouge2_r",
    "rouge2_f1",
)

MARK_UP = "▲"  # filled triangle up: significantly above baseline
MARK_DOWN = "▼"  # filled triangle down: significantly below baseline
MARK_BASELINE = "★"  # star: the baseline row


def row_tag(article: GeneratedArticle) -> str:
    method = article.method
    if "system" in method:
        return str(method["system"])
    return f"{method.get('retrieval', '?')}+{method.get('clustering', '?')}"


@dataclass(frozen=True)
class MatrixRow:
    tag: str
    values: Mapping[str, float]  # column -> aggregate
    per_query: Mapping[str, Mapping[str, float]]  # column -> qid -> value
    marks: Mapping[str, str]  # column -> "" | MARK_UP | MARK_DOWN
    n_queries: int


@dataclass(frozen=True)
class EvaluationMatrix:
    rows: tuple[MatrixRow, ...]
    baseline_tag: str
    alpha: float

    def bold(self) -> dict[str, tuple[str, ...]]:
        """Tags holding each column's maximum value."""
        out: dict[str, tuple[str, ...]] = {}
        for col in MATRIX_COLUMNS:
            top = max(row.values[col] for row in self.rows)
            out[col] = tuple(row.tag for row in self.rows if row.values[col] == top)
        return out

    def to_csv(self) -> str:
        header = ["method", "baseline"]
        for col in MATRIX_COLUMNS:
            header.extend([col, f"{col}_mark"])
        lines = [",".join(header)]
        for row in self.rows:
            cells = [row.tag, "1" if row.tag == self.baseline_tag else "0"]
            for col in MATRIX_COLUMNS:
                cells.extend([f"{row.values[col]:.4f}", row.marks[col]])
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        bold = self.bold()
        labels = {
            "rouge1_p": "R1-P",
            "rouge1_r": "R1-R",
            "rouge1_f1": "R1-F1",
            "rouge2_p": "R2-P",
            "rouge2_r": "R2-R",
            "rouge2_f1": "R2-F1",
        }
        names = [
            row.tag + (" " + MARK_BASELINE if row.tag == self.baseline_tag else "")
            for row in self.rows
        ]
        name_width = max(len("method"), *(len(n) for n in names))
        cell_width = 12
        head = "method".ljust(name_width) + "".join(
            labels[c].rjust(cell_width) for c in MATRIX_COLUMNS
        )
        lines = [head]
        for name, row in zip(names, self.rows):
            cells = []
            for col in MATRIX_COLUMNS:
                text = f"{row.values[col]:.4f}{row.marks[col]}"
                if row.tag in bold[col]:
                    text = f"**{text}**"
                cells.append(text.rjust(cell_width))
            lines.append(name.ljust(name_width) + "".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline_tag,
            "alpha": self.alpha,
            "columns": list(MATRIX_COLUMNS),
            "rows": [
                {
                    "method": row.tag,
                    "values": {c: row.values[c] for c in MATRIX_COLUMNS},
                    "marks": {c: row.marks[c] for c in MATRIX_COLUMNS},
                    "queries": row.n_queries,
                }
                for row in self.rows
            ],
            "bold": {c: list(tags) for c, tags in self.bold().items()},
        }


def _article_scores(article: GeneratedArticle, gold_text: str) -> dict[str, float]:
    r1 = rouge_n(article.flat_text(), gold_text, 1)
    r2 = rouge_n(article.flat_text(), gold_text, 2)
    return {
        "rouge1_p": r1.precision,
        "rouge1_r": r1.recall,
        "rouge1_f1": r1.f1,
        "rouge2_p": r2.precision,
        "rouge2_r": r2.recall,
        "rouge2_f1": r2.f1,
    }


def evaluation_matrix(
    articles: Sequence[GeneratedArticle],
    gold_articles: Mapping[str, str],
    baseline_tag: str,
    b_resamples: int = DEFAULT_BOOTSTRAP_B,
    seed: int = DEFAULT_BOOTSTRAP_SEED,
    alpha: float = DEFAULT_ALPHA,
) -> EvaluationMatrix:
    """Score every article against its gold text and assemble the marked
    matrix. Significance marks compare per-query values with the
    baseline row over the queries both rows evaluated."""
    per_tag: dict[str, dict[str, dict[str, float]]] = {}
    tag_order: list[str] = []
    for article in articles:
        gold = gold_articles.get(article.query_id)
        if gold is None:
            raise DataError(f"query {article.query_id!r}: no gold article")
        tag = row_tag(article)
        if tag not in per_tag:
            per_tag[tag] = {col: {} for col in MATRIX_COLUMNS}
            tag_order.append(tag)
        if article.query_id in per_tag[tag]["rouge1_p"]:
            raise DataError(f"system {tag!r}: duplicate article for {article.query_id!r}")
        for col, value in _article_scores(article, gold).items():
            per_tag[tag][col][article.query_id] = value
    if baseline_tag not in per_tag:
        raise DataError(f"baseline {baseline_tag!r} not among systems {tag_order}")

    rows: list[MatrixRow] = []
    base = per_tag[baseline_tag]
    for tag in tag_order:
        cols = per_tag[tag]
        qids = sorted(cols["rouge1_p"])
        values = {col: sum(cols[col].values()) / len(qids) for col in MATRIX_COLUMNS}
        marks: dict[str, str] = {}
        for col in MATRIX_COLUMNS:
            if tag == baseline_tag:
                marks[col] = ""
                continue
            shared = sorted(set(cols[col]) & set(base[col]))
            if not shared:
                raise DataError(
                    f"system {tag!r} shares no evaluated queries with the baseline"
                )
            result = paired_significance(
                {q: cols[col][q] for q in shared},
                {q: base[col][q] for q in shared},
                b_resamples=b_resamples,
                seed=seed,
                alpha=alpha,
            )
            if result.significant and result.direction > 0:
                marks[col] = MARK_UP
            elif result.significant and result.direction < 0:
                marks[col] = MARK_DOWN
            else:
                marks[col] = ""
        rows.append(
            MatrixRow(
                tag=tag,
                values=values,
                per_query={col: dict(cols[col]) for col in MATRIX_COLUMNS},
                marks=marks,
                n_queries=len(qids),
            )
        )
    return EvaluationMatrix(rows=tuple(rows), baseline_tag=baseline_tag, alpha=alpha)


def _save_bars(
    path: Path,
    labels: Sequence[str],
    series: Mapping[str, Sequence[float]],
    title: str,
    ylabel: str,
) -> Path:
    """Render grouped bars and write the PNG atomically with metadata
    pinned so identical inputs give identical bytes."""
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(labels) + 2.0), 4.0))
    n_series = len(series)
    width = 0.8 / n_series
    for i, (name, values) in enumerate(series.items()):
        offsets = [x + (i - (n_series - 1) / 2.0) * width for x in range(len(labels))]
        ax.bar(offsets, list(values), width=width, label=name)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    if n_series > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=100, metadata={"Software": None})
    plt.close(fig)
    return write_bytes_atomic(path, buf.getvalue())


def render_figures(
    out_dir: str | Path,
    retrieval_reports: Mapping[str, MetricReport],
    clustering_reports: Mapping[str, MetricReport],
    matrix: EvaluationMatrix,
) -> list[Path]:
    """Write the three report figures; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    methods = list(retrieval_reports)
    written.append(
        _save_bars(
            out_dir / "retrieval_map.png",
            methods,
            {"MAP": [retrieval_reports[m].aggregate for m in methods]},
            "Retrieval quality by method",
            "mean average precision",
        )
    )
    methods = list(clustering_reports)
    written.append(
        _save_bars(
            out_dir / "clustering_ari.png",
            methods,
            {"ARI": [clustering_reports[m].aggregate for m in methods]},
            "Clustering quality by method",
            "adjusted Rand index",
        )
    )
    tags = [row.tag for row in matrix.rows]
    written.append(
        _save_bars(
            out_dir / "system_rouge.png",
            tags,
            {
                "ROUGE-1 F1": [row.values["rouge1_f1"] for row in matrix.rows],
                "ROUGE-2 F1": [row.values["rouge2_f1"] for row in matrix.rows],
            },
            "End-to-end article quality by system",
            "F1",
        )
    )
    return written
