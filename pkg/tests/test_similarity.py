"""Embedding store, pair features, and the trained pair metric."""

import math
import random

import numpy as np
import pytest

from articlegen.benchmark import ClusterGold
from articlegen.corpus import Query
from articlegen.errors import DataError
from articlegen.similarity import (
    EmbeddingStore,
    QSMetricModel,
    base_similarity,
    build_pair_dataset,
    cosine,
    euclidean_similarity,
    load_embeddings,
    load_metric_model,
    pairwise_similarity_fn,
    qs_features,
    qs_similarity,
    query_vector,
    save_metric_model,
    train_qs_metric,
    write_embeddings,
)


def store_of(dim=2, **vectors) -> EmbeddingStore:
    return EmbeddingStore(
        dim=dim, vectors={k: np.array(v, dtype=np.float64) for k, v in vectors.items()}
    )


class TestEmbeddingFile:
    def test_load_minimal(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dim 3\np:a\t1 0 0\np:b\t0 1 0\n", encoding="utf-8")
        store = load_embeddings(path)
        assert store.dim == 3
        assert sorted(store.vectors) == ["p:a", "p:b"]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dimension 3\n", encoding="utf-8")
        with pytest.raises(DataError, match="bad header"):
            load_embeddings(path)

    def test_dimension_below_two(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dim 1\np:a\t1\n", encoding="utf-8")
        with pytest.raises(DataError, match=">= 2"):
            load_embeddings(path)

    def test_wrong_value_count_names_id(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dim 3\np:a\t1 0\n", encoding="utf-8")
        with pytest.raises(DataError, match="p:a"):
            load_embeddings(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dim 2\np:a\t1 0\np:a\t0 1\n", encoding="utf-8")
        with pytest.raises(DataError, match="duplicate id"):
            load_embeddings(path)

    def test_non_finite_value(self, tmp_path):
        path = tmp_path / "e.tsv"
        path.write_text("dim 2\np:a\t1 inf\n", encoding="utf-8")
        with pytest.raises(DataError, match="non-finite"):
            load_embeddings(path)

    def test_roundtrip(self, tmp_path):
        store = store_of(**{"p:a": [1.5, -0.25], "qt:q": [0.0, 2.0]})
        path = tmp_path / "e.tsv"
        write_embeddings(store, path)
        again = load_embeddings(path)
        assert again.dim == 2
        for key, vec in store.vectors.items():
            assert np.allclose(again.vectors[key], vec)

    def test_missing_vector_names_id(self):
        store = store_of(**{"p:a": [1, 0]})
        with pytest.raises(DataError, match="p:zzz"):
            store.vector("p:zzz")


class TestBaseSimilarity:
    def test_identity(self):
        store = store_of(**{"p:a": [1, 0], "p:b": [1, 0]})
        assert base_similarity(store, "p:a", "p:b", "cosine") == pytest.approx(1.0)
        assert base_similarity(store, "p:a", "p:b", "euclidean") == pytest.approx(1.0)

    def test_orthogonal_cosine_zero(self):
        store = store_of(**{"p:a": [1, 0], "p:b": [0, 1]})
        assert base_similarity(store, "p:a", "p:b", "cosine") == pytest.approx(0.0)

    def test_euclidean_three_four_five(self):
        assert euclidean_similarity(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == pytest.approx(
            1 / 6
        )

    def test_cosine_zero_norm_rejected(self):
        with pytest.raises(DataError, match="zero-norm"):
            cosine(np.array([0.0, 0.0]), np.array([1.0, 0.0]))


class TestQueryVector:
    def test_title_and_lead_resolve_stored_vectors(self):
        store = store_of(**{"qt:q1": [1, 0], "ql:q1": [0, 1]})
        query = Query("q1", "T", lead="L")
        assert np.allclose(query_vector(store, query, "title"), [1, 0])
        assert np.allclose(query_vector(store, query, "lead"), [0, 1])

    def test_mean_is_candidate_centroid(self):
        store = store_of(**{"p:a": [1, 0], "p:b": [0, 1]})
        vec = query_vector(store, Query("q1", "T"), "mean", ["a", "b"])
        assert np.allclose(vec, [0.5, 0.5])

    def test_mean_requires_candidates(self):
        with pytest.raises(DataError, match="candidate"):
            query_vector(store_of(), Query("q1", "T"), "mean", [])

    def test_missing_lead_vector_names_key(self):
        store = store_of(**{"qt:q1": [1, 0]})
        with pytest.raises(DataError, match="ql:q1"):
            query_vector(store, Query("q1", "T"), "lead")


class TestQSFeatures:
    def test_identical_unit_vectors(self):
        u = np.array([1.0, 0.0])
        feats = qs_features(u, u.copy(), u.copy())
        assert np.allclose(feats, [1, 1, 1, 0, 1])

    def test_orthogonal_with_query_on_u(self):
        u = np.array([1.0, 0.0])
        v = np.array([0.0, 1.0])
        # query cosines are 1 (u) and 0 (v); sorted order puts 0 first
        feats = qs_features(u, v, u.copy())
        assert np.allclose(feats, [0, 0, 1, 1, 1 / (1 + math.sqrt(2))])

    def test_symmetric_under_swap(self):
        rng = np.random.default_rng(3)
        u, v, q = rng.normal(size=(3, 5))
        assert np.allclose(qs_features(u, v, q), qs_features(v, u, q))

    def test_dimension_mismatch(self):
        with pytest.raises(DataError, match="dimension"):
            qs_features(np.ones(2), np.ones(3), np.ones(2))


def separable_world(n_queries=4, per_section=4, spread=0.05):
    """Queries whose two sections sit on opposite unit axes; trivially
    separable pair classification."""
    rng = np.random.default_rng(11)
    vectors: dict[str, np.ndarray] = {}
    gold = ClusterGold()
    queries = []
    for qi in range(n_queries):
        qid = f"q{qi}"
        a_axis = np.array([3.0, 0.0, 0.5])
        b_axis = np.array([0.0, 3.0, 0.5])
        labels = {}
        for i in range(per_section):
            labels[f"{qid}a{i}"] = "alpha"
            labels[f"{qid}b{i}"] = "beta"
            vectors[f"p:{qid}a{i}"] = a_axis + rng.normal(0, spread, 3)
            vectors[f"p:{qid}b{i}"] = b_axis + rng.normal(0, spread, 3)
        gold.labels[qid] = labels
        vectors[f"qt:{qid}"] = np.array([1.5, 1.5, 0.5]) + rng.normal(0, spread, 3)
        vectors[f"ql:{qid}"] = np.array([1.5, 1.5, 0.5]) + rng.normal(0, spread, 3)
        queries.append(Query(qid, f"title {qid}", lead="lead"))
    return EmbeddingStore(dim=3, vectors=vectors), gold, queries


class TestTraining:
    def test_zero_model_predicts_half(self):
        model = QSMetricModel.zero()
        rng = np.random.default_rng(5)
        for _ in range(10):
            u, v, q = rng.normal(size=(3, 4))
            assert qs_similarity(model, u, v, q) == pytest.approx(0.5)

    def test_dataset_is_balanced(self):
        store, gold, queries = separable_world(n_queries=2)
        xs, ys = build_pair_dataset(store, gold, queries, "title", random.Random(1))
        assert len(xs) == len(ys)
        assert float(np.sum(ys)) == pytest.approx(len(ys) / 2)

    def test_lead_model_skips_queries_without_lead_vector(self):
        store, gold, queries = separable_world(n_queries=1)
        del store.vectors["ql:q0"]
        with pytest.raises(DataError, match="no training pairs"):
            build_pair_dataset(store, gold, queries, "lead", random.Random(1))

    def test_loss_decreases_and_training_is_deterministic(self):
        store, gold, queries = separable_world()
        m1 = train_qs_metric(store, gold, queries, "title", epochs=10, seed=13)
        m2 = train_qs_metric(store, gold, queries, "title", epochs=10, seed=13)
        assert m1.loss_history[-1] < m1.loss_history[0]
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_model_json_roundtrip(self, tmp_path):
        store, gold, queries = separable_world(n_queries=1)
        model = train_qs_metric(store, gold, queries, "title", epochs=3)
        path = tmp_path / "model.json"
        save_metric_model(model, path)
        again = load_metric_model(path)
        assert np.array_equal(again.weights, model.weights)
        assert again.query_model == "title"
        assert again.loss_history == model.loss_history

    def test_foreign_feature_version_rejected(self, tmp_path):
        model = QSMetricModel.zero()
        obj = model.to_json()
        obj["feature_version"] = "other-v9"
        with pytest.raises(DataError, match="feature version"):
            QSMetricModel.from_json(obj)


class TestPairwiseSimilarityFn:
    def test_sbert_methods_work_without_models(self):
        store = store_of(**{"p:a": [1, 0], "p:b": [0, 1]})
        query = Query("q", "T")
        euclid = pairwise_similarity_fn("sbert-euclid", store, query, ["a", "b"])
        cos = pairwise_similarity_fn("sbert-cosine", store, query, ["a", "b"])
        assert euclid("a", "b") == pytest.approx(1 / (1 + math.sqrt(2)))
        assert cos("a", "b") == pytest.approx(0.0)

    def test_qs_method_requires_model(self):
        store = store_of(**{"p:a": [1, 0], "qt:q": [1, 1]})
        with pytest.raises(DataError, match="trained metric model"):
            pairwise_similarity_fn("qs3m-title", store, Query("q", "T"), ["a"])

    def test_qs_method_uses_query_conditioning(self):
        store, gold, queries = separable_world(n_queries=2)
        model = train_qs_metric(store, gold, queries, "title", epochs=15)
        sim = pairwise_similarity_fn(
            "qs3m-title", store, queries[0], sorted(gold.labels["q0"]), {"title": model}
        )
        same = sim("q0a0", "q0a1")
        cross = sim("q0a0", "q0b0")
        assert same > cross

    def test_unknown_method(self):
        with pytest.raises(DataError, match="unknown clustering method"):
            pairwise_similarity_fn("kmeans", store_of(), Query("q", "T"), [])
