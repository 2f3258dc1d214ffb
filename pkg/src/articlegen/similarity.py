"""Pairwise document similarity: embedding store, base metrics, and the
trained query-specific metric.

Two families are supported. The query-agnostic family works directly on
stored sentence embeddings (cosine, or Euclidean distance mapped to
1/(1+d) so that clustering can uniformly maximize a similarity). The
query-specific family scores a document pair conditioned on a query
vector: a logistic model over five pairwise-similarity features, trained
on section labels (same section = similar). Three query models supply
the query vector: the stored title vector, the stored lead vector, or
the centroid of the candidate document vectors.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .benchmark import ClusterGold
from .corpus import Query
from .errors import DataError
from .fileio import write_text_atomic

QueryModel = Literal["title", "lead", "mean"]
QUERY_MODELS: tuple[QueryModel, ...] = ("title", "lead", "mean")

FEATURE_VERSION = "pairsim-5f-v1"
N_FEATURES = 5

SBERT_EUCLID = "sbert-euclid"
SBERT_COSINE = "sbert-cosine"
QS_TITLE = "qs3m-title"
QS_LEAD = "qs3m-lead"
QS_MEAN = "qs3m-mean"
CLUSTERING_METHODS = (SBERT_EUCLID, SBERT_COSINE, QS_TITLE, QS_LEAD, QS_MEAN)


def paragraph_key(paragraph_id: str) -> str:
    return f"p:{paragraph_id}"


def query_title_key(query_id: str) -> str:
    return f"qt:{query_id}"


def query_lead_key(query_id: str) -> str:
    return f"ql:{query_id}"


@dataclass(frozen=True)
class EmbeddingStore:
    dim: int
    vectors: dict[str, np.ndarray]

    def vector(self, key: str) -> np.ndarray:
        vec = self.vectors.get(key)
        if vec is None:
            raise DataError(f"no embedding stored for id {key!r}")
        return vec

    def __contains__(self, key: str) -> bool:
        return key in self.vectors


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Load the `dim <D>` + tab-separated rows embedding format."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "dim":
            raise DataError(f"{path}: bad header {header!r}, expected 'dim <D>'")
        try:
            dim = int(parts[1])
        except ValueError as exc:
            raise DataError(f"{path}: bad dimension {parts[1]!r}") from exc
        if dim < 2:
            raise DataError(f"{path}: dimension must be >= 2, got {dim}")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            row_id, _, rest = line.rstrip("\n").partition("\t")
            if not row_id or not rest:
                raise DataError(f"{path}:{lineno}: expected '<id>\\t<values>'")
            if row_id in vectors:
                raise DataError(f"{path}:{lineno}: duplicate id {row_id!r}")
            values = rest.split()
            if len(values) != dim:
                raise DataError(
                    f"{path}:{lineno}: id {row_id!r} has {len(values)} values, expected {dim}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: id {row_id!r} has a non-numeric value") from exc
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path}:{lineno}: id {row_id!r} has a non-finite value")
            vectors[row_id] = vec
    return EmbeddingStore(dim=dim, vectors=vectors)


def write_embeddings(store: EmbeddingStore, path: str | Path, decimals: int = 6) -> Path:
    lines = [f"dim {store.dim}\n"]
    for key in sorted(store.vectors):
        vals = " ".join(f"{v:.{decimals}f}" for v in store.vectors[key])
        lines.append(f"{key}\t{vals}\n")
    return write_text_atomic(path, "".join(lines))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise DataError("cosine similarity undefined for a zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def euclidean_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Euclidean distance mapped to a similarity in (0, 1] via 1/(1+d)."""
    return 1.0 / (1.0 + float(np.linalg.norm(u - v)))


def base_similarity(store: EmbeddingStore, a: str, b: str, kind: str) -> float:
    u = store.vector(a)
    v = store.vector(b)
    if kind == "cosine":
        return cosine(u, v)
    if kind == "euclidean":
        return euclidean_similarity(u, v)
    raise DataError(f"unknown similarity kind {kind!r}")


def query_vector(
    store: EmbeddingStore,
    query: Query,
    model: QueryModel,
    candidates: Sequence[str] = (),
) -> np.ndarray:
    """Resolve the query vector for one of the three query models."""
    if model == "title":
        return store.vector(query_title_key(query.id))
    if model == "lead":
        return store.vector(query_lead_key(query.id))
    if model == "mean":
        if not candidates:
            raise DataError(f"query {query.id!r}: mean query model needs candidate documents")
        vecs = [store.vector(paragraph_key(pid)) for pid in candidates]
        return np.mean(np.stack(vecs), axis=0)
    raise DataError(f"unknown query model {model!r}")


def qs_features(u: np.ndarray, v: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Five pairwise features:

    [cos(u,v), cos(.,q) smaller, cos(.,q) larger, |cos(u,q) - cos(v,q)|,
     1/(1+||u-v||)]

    The two query cosines sit in sorted order so the vector (and any
    similarity built on it) is exactly symmetric under swap of u and v.
    """
    if not (u.shape == v.shape == q.shape):
        raise DataError("qs_features: vectors must share one dimension")
    cuv = cosine(u, v)
    lo, hi = sorted((cosine(u, q), cosine(v, q)))
    return np.array(
        [cuv, lo, hi, hi - lo, euclidean_similarity(u, v)], dtype=np.float64
    )


@dataclass(frozen=True)
class QSMetricModel:
    weights: np.ndarray  # length N_FEATURES
    bias: float
    query_model: QueryModel
    feature_version: str = FEATURE_VERSION
    loss_history: tuple[float, ...] = ()

    @classmethod
    def zero(cls, query_model: QueryModel = "title") -> "QSMetricModel":
        return cls(weights=np.zeros(N_FEATURES), bias=0.0, query_model=query_model)

    def to_json(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "bias": self.bias,
            "query_model": self.query_model,
            "feature_version": self.feature_version,
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QSMetricModel":
        weights = np.array(obj["weights"], dtype=np.float64)
        if weights.shape != (N_FEATURES,):
            raise DataError(f"metric model has {weights.shape[0]} weights, expected {N_FEATURES}")
        if obj.get("feature_version") != FEATURE_VERSION:
            raise DataError(
                f"metric model feature version {obj.get('feature_version')!r} "
                f"does not match {FEATURE_VERSION!r}"
            )
        return cls(
            weights=weights,
            bias=float(obj["bias"]),
            query_model=obj["query_model"],
            feature_version=FEATURE_VERSION,
            loss_history=tuple(obj.get("loss_history", ())),
        )


def save_metric_model(model: QSMetricModel, path: str | Path) -> Path:
    return write_text_atomic(path, json.dumps(model.to_json(), sort_keys=True, indent=2) + "\n")


def load_metric_model(path: str | Path) -> QSMetricModel:
    with Path(path).open("r", encoding="utf-8") as fh:
        return QSMetricModel.from_json(json.load(fh))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def qs_similarity(model: QSMetricModel, u: np.ndarray, v: np.ndarray, q: np.ndarray) -> float:
    """Query-conditioned pair similarity in (0, 1); symmetric in u, v."""
    feats = qs_features(u, v, q)
    return _sigmoid(float(np.dot(model.weights, feats)) + model.bias)


def _log_loss(xs: np.ndarray, ys: np.ndarray, w: np.ndarray, bias: float) -> float:
    z = xs @ w + bias
    p = 1.0 / (1.0 + np.exp(-z))
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(ys * np.log(p) + (1.0 - ys) * np.log(1.0 - p)))


def build_pair_dataset(
    store: EmbeddingStore,
    cluster_gold: ClusterGold,
    queries: Iterable[Query],
    model: QueryModel,
    rng: random.Random,
) -> tuple[np.ndarray, np.ndarray]:
    """Labeled feature vectors for all within-query paragraph pairs.

    Label 1 = same section, 0 = different section; per query, the majority
    class is downsampled to the minority count so classes stay balanced.
    Queries that yield only one class are skipped.
    """
    xs: list[np.ndarray] = []
    ys: list[float] = []
    by_id = {q.id: q for q in queries}
    for qid in sorted(cluster_gold.labels):
        query = by_id.get(qid)
        if query is None:
            continue
        labels = cluster_gold.labels[qid]
        pids = sorted(labels)
        if len(pids) < 2:
            continue
        if model == "lead" and query_lead_key(qid) not in store:
            continue
        qvec = query_vector(store, query, model, pids)
        positives: list[tuple[str, str]] = []
        negatives: list[tuple[str, str]] = []
        for i in range(len(pids)):
            for j in range(i + 1, len(pids)):
                pair = (pids[i], pids[j])
                (positives if labels[pair[0]] == labels[pair[1]] else negatives).append(pair)
        if not positives or not negatives:
            continue
        n_keep = min(len(positives), len(negatives))
        if len(positives) > n_keep:
            positives = rng.sample(positives, n_keep)
        if len(negatives) > n_keep:
            negatives = rng.sample(negatives, n_keep)
        for pair, label in [(p, 1.0) for p in positives] + [(p, 0.0) for p in negatives]:
            u = store.vector(paragraph_key(pair[0]))
            v = store.vector(paragraph_key(pair[1]))
            xs.append(qs_features(u, v, qvec))
            ys.append(label)
    if not xs:
        raise DataError("no training pairs constructible from the cluster gold")
    return np.stack(xs), np.array(ys, dtype=np.float64)


def train_qs_metric(
    store: EmbeddingStore,
    cluster_gold: ClusterGold,
    queries: Iterable[Query],
    model: QueryModel,
    epochs: int = 20,
    lr: float = 0.05,
    seed: int = 13,
) -> QSMetricModel:
    """Fit the logistic pair-similarity model by seeded SGD on log-loss.

    Deterministic for a fixed seed: pair sampling, example order, and the
    resulting weights are all reproducible run to run.
    """
    rng = random.Random(seed)
    xs, ys = build_pair_dataset(store, cluster_gold, queries, model, rng)
    w = np.zeros(N_FEATURES, dtype=np.float64)
    bias = 0.0
    history = [_log_loss(xs, ys, w, bias)]
    order = list(range(len(ys)))
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            z = float(np.dot(w, xs[idx])) + bias
            grad = _sigmoid(z) - ys[idx]
            w = w - lr * grad * xs[idx]
            bias -= lr * grad
        history.append(_log_loss(xs, ys, w, bias))
    return QSMetricModel(
        weights=w, bias=bias, query_model=model, loss_history=tuple(history)
    )


PairSimilarity = Callable[[str, str], float]


def pairwise_similarity_fn(
    method: str,
    store: EmbeddingStore,
    query: Query,
    candidates: Sequence[str],
    metric_models: dict[str, QSMetricModel] | None = None,
) -> PairSimilarity:
    """Build a (paragraph id, paragraph id) -> similarity callable.

    For the mean query model the query vector is the centroid of the full
    candidate set, computed once up front.
    """
    if method == SBERT_EUCLID:
        return lambda a, b: base_similarity(
            store, paragraph_key(a), paragraph_key(b), "euclidean"
        )
    if method == SBERT_COSINE:
        return lambda a, b: base_similarity(store, paragraph_key(a), paragraph_key(b), "cosine")
    if method in (QS_TITLE, QS_LEAD, QS_MEAN):
        variant: QueryModel = method.split("-", 1)[1]  # type: ignore[assignment]
        if not metric_models or variant not in metric_models:
            raise DataError(f"method {method!r} needs a trained metric model")
        model = metric_models[variant]
        qvec = query_vector(store, query, variant, candidates)
        return lambda a, b: qs_similarity(
            model, store.vector(paragraph_key(a)), store.vector(paragraph_key(b)), qvec
        )
    raise DataError(f"unknown clustering method {method!r}")
