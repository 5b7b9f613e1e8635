import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelets.clustering import (
    ClusterModel,
    ClusteringError,
    alignment_score,
    bcss_per_feature,
    scores_csv,
    sparse_kmeans,
    train_test_split,
    update_weights,
    weighted_cosines,
)
from hodgelets.dictionary import standard_dictionary


def two_clouds(rng, P=12, noise_dims=50):
    labels = np.arange(P) % 2
    informative = np.where(labels[:, None] == 0, -4.0, 4.0) + rng.normal(scale=0.5, size=(P, 2))
    return np.hstack([informative, rng.normal(size=(P, noise_dims))]), labels


def exhaustive_two_split(Z):
    best = None
    P = len(Z)
    for bits in itertools.product([0, 1], repeat=P - 1):
        lab = np.array((0,) + bits)
        if lab.min() == lab.max():
            continue
        w = sum(((Z[lab == k] - Z[lab == k].mean(axis=0)) ** 2).sum() for k in (0, 1))
        if best is None or w < best[0]:
            best = (w, lab)
    return best[1]


def same_partition(a, b):
    return np.array_equal(a, b) or np.array_equal(a, 1 - b)


def test_informative_features_selected(rng):
    X, labels = two_clouds(rng)
    m = sparse_kmeans(X, 2, s=1.2, seed=3)
    assert same_partition(m.assignments, labels)
    assert m.weights[:2].sum() / m.weights.sum() > 0.9
    oracle = exhaustive_two_split(X[:, m.weights > 0] * np.sqrt(m.weights[m.weights > 0]))
    assert same_partition(m.assignments, oracle)


def test_full_budget_weights_follow_bcss(rng):
    X, labels = two_clouds(rng, P=10, noise_dims=4)
    D = X.shape[1]
    m = sparse_kmeans(X, 2, s=np.sqrt(D), seed=0)
    a = bcss_per_feature(X, m.assignments, 2)
    # the l1 budget sqrt(D) never binds, so w is a / ||a||, uniform only if a is
    assert np.allclose(m.weights, np.maximum(a, 0) / np.linalg.norm(np.maximum(a, 0)))


def test_K_equals_P(rng):
    X = rng.normal(size=(5, 4))
    m = sparse_kmeans(X, 5, s=1.5, seed=1)
    assert sorted(m.assignments.tolist()) == [0, 1, 2, 3, 4]
    assert np.allclose(np.sort(m.centroids, axis=0), np.sort(X, axis=0))


def test_validation(rng):
    X = rng.normal(size=(4, 9))
    with pytest.raises(ClusteringError):
        sparse_kmeans(X, 5)
    with pytest.raises(ClusteringError):
        sparse_kmeans(X, 1)
    with pytest.raises(ClusteringError):
        sparse_kmeans(X, 2, s=0.5)
    with pytest.raises(ClusteringError):
        sparse_kmeans(X, 2, s=3.5)


def test_deterministic(rng):
    X, _ = two_clouds(rng, P=30)
    a = sparse_kmeans(X, 2, 2.0, seed=9)
    b = sparse_kmeans(X, 2, 2.0, seed=9)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.assignments, b.assignments)


def test_empty_cluster_refill():
    # identical points: every restart collapses to one cluster unless refilled
    X = np.ones((6, 3))
    X[5] += 1e-3
    m = sparse_kmeans(X, 3, s=1.0, seed=0)
    assert len(set(m.assignments.tolist())) == 3


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 100), min_size=1, max_size=40), st.floats(1.0, 7.0))
def test_weight_update_constraints(a, s):
    a = np.array(a)
    w = update_weights(a, s)
    assert (w >= 0).all()
    assert np.linalg.norm(w) <= 1 + 1e-10
    if np.any(a > 0):
        assert w.sum() <= s + 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.floats(1.0, 4.0))
def test_model_invariants(seed, s):
    rng = np.random.default_rng(seed)
    X, _ = two_clouds(rng, P=20, noise_dims=14)
    m = sparse_kmeans(X, 2, s, seed)
    assert (m.weights >= 0).all()
    assert np.linalg.norm(m.weights) <= 1 + 1e-10 and m.weights.sum() <= s + 1e-10
    for k in range(2):
        assert np.allclose(m.centroids[k], X[m.assignments == k].mean(axis=0))
    obj = np.array(m.objective)
    assert (np.diff(obj) >= -1e-9 * max(1.0, abs(obj).max())).all()


def test_weighted_cosines_guard():
    F = np.array([[1.0, 0.0], [0.0, 0.0]])
    C = np.array([[1.0, 0.0], [0.0, 1.0]])
    cos = weighted_cosines(F, C, np.array([1.0, 1.0]))
    assert np.allclose(cos, [[1, 0], [0, 0]])


def test_alignment_score_examples(rng):
    D = standard_dictionary(4)
    c = rng.normal(size=(2, 4))
    model = ClusterModel(2, 2.0, np.full(4, 0.5), c, np.array([0, 1]), 0)
    assert np.isclose(alignment_score(model, c[:1] * 3, D), 1.0)
    w = np.array([1.0, 1.0, 0.0, 0.0])
    orth = ClusterModel(2, 2.0, w / np.sqrt(2), np.array([[1.0, 0, 5, 5], [0, 1.0, 5, 5]]), np.array([0, 1]), 0)
    assert alignment_score(orth, np.array([[0.0, 0.0, 1.0, 1.0]]), D) == 0.0
    one = ClusterModel(1, 2.0, np.full(4, 0.5), c[:1], np.array([0]), 0)
    flows = rng.normal(size=(5, 4))
    expected = (flows @ c[0]) / (np.linalg.norm(flows, axis=1) * np.linalg.norm(c[0]))
    assert np.isclose(alignment_score(one, flows, D), expected.mean())
    with pytest.raises(ClusteringError):
        alignment_score(model, np.zeros((1, 5)), standard_dictionary(5))


def test_train_test_split():
    tr, ts = train_test_split(334, 0.75, 0)
    assert (len(tr), len(ts)) == (250, 84)
    assert sorted(np.concatenate([tr, ts]).tolist()) == list(range(334))
    tr, ts = train_test_split(2, 0.5, 0)
    assert (len(tr), len(ts)) == (1, 1)
    a, b = train_test_split(50, 0.75, 4), train_test_split(50, 0.75, 4)
    assert np.array_equal(a[0], b[0])
    with pytest.raises(ClusteringError):
        train_test_split(1, 0.5, 0)
    with pytest.raises(ClusteringError):
        train_test_split(10, 1.0, 0)


def test_exports():
    m = ClusterModel(2, 1.5, np.array([1.0, 0.0]), np.zeros((2, 2)), np.array([0, 1]), 7)
    d = json.loads(m.to_json())
    assert d["K"] == 2 and d["seed"] == 7 and d["weights"] == [1.0, 0.0]
    assert scores_csv({"standard": 0.5}).splitlines() == ["representation,L", "standard,0.5"]
