# tests/test_knn.py

"""
Tests for kNN classification and its tie-breaking rules.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from src.evaluation.distances import distance_chunks
from src.evaluation.knn import KnnClassifier, knn_predict, vote
from src.exceptions import ParameterError
from src.weighting.term_weights import DocVector


# --- Test Data Fixtures ---

@pytest.fixture
def line_train():
    """Points 0 and 1 labelled A, point 10 labelled B."""
    vectors = [np.array([0.0]), np.array([1.0]), np.array([10.0])]
    return vectors, ["A", "A", "B"]


# --- Test Cases ---

def test_majority_and_nearest(line_train):
    vectors, labels = line_train
    query = np.array([9.0])
    assert knn_predict(vectors, labels, query, k=3) == "A", "two of three neighbours are A"
    assert knn_predict(vectors, labels, query, k=1) == "B", "the nearest point is B"


def test_single_training_point():
    assert knn_predict([np.array([5.0, 5.0])], ["only"], np.array([0.0, 0.0]), k=1) == "only"


def test_errors(line_train):
    vectors, labels = line_train
    with pytest.raises(ParameterError):
        knn_predict([], [], np.array([0.0]), k=1)
    with pytest.raises(ParameterError):
        knn_predict(vectors, labels, np.array([0.0]), k=4)
    with pytest.raises(ParameterError):
        knn_predict(vectors, labels, np.array([0.0]), k=0)


def test_k_larger_than_training_set_is_rejected(line_train):
    vectors, labels = line_train
    with pytest.raises(ParameterError, match="1..3"):
        knn_predict(vectors, labels, np.array([0.0]), k=len(vectors) + 1)
    with pytest.raises(ParameterError):
        KnnClassifier().fit(np.vstack(vectors), labels).predict_for_ks(np.array([[0.0]]), [1, 50])


def test_vote_ties():
    """Equal counts go to the smaller total distance, then the smaller label."""
    assert vote(["B", "A"], [1.0, 2.0]) == "B"
    assert vote(["B", "A"], [1.0, 1.0]) == "A"
    assert vote(["B", "A", "A"], [0.1, 5.0, 5.0]) == "A"


def test_distance_ties_use_document_index():
    """Two training points at the same distance: the smaller index is the neighbour."""
    vectors = [np.array([1.0]), np.array([-1.0])]
    assert knn_predict(vectors, ["X", "Y"], np.array([0.0]), k=1, train_indices=[2, 1]) == "Y"
    assert knn_predict(vectors, ["X", "Y"], np.array([0.0]), k=1, train_indices=[1, 2]) == "X"


def test_document_indices_compare_numerically():
    """Index 2 precedes index 10 even though "10" sorts first as text."""
    vectors = [np.array([1.0]), np.array([-1.0])]
    assert knn_predict(vectors, ["ten", "two"], np.array([0.0]), k=1, train_indices=[10, 2]) == "two"
    with pytest.raises(ParameterError):
        knn_predict(vectors, ["ten", "two"], np.array([0.0]), k=1, train_indices=["d10", "d2"])


@pytest.mark.parametrize("seed", range(5))
def test_permutation_invariance(seed):
    """Shuffling the training list (ids travel with it) never changes a prediction."""
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 3, size=(12, 2)).astype(float)
    train = np.vstack([base, base[:6]])
    labels = list(rng.choice(["A", "B", "C"], size=len(train)))
    ids = list(range(len(train)))
    queries = rng.integers(0, 3, size=(10, 2)).astype(float)

    order = rng.permutation(len(train))
    for q in queries:
        for k in (1, 2, 3, 5):
            expected = knn_predict(list(train), labels, q, k, train_indices=ids)
            shuffled = knn_predict(
                list(train[order]), [labels[i] for i in order], q, k, train_indices=[ids[i] for i in order]
            )
            assert expected == shuffled


def test_uniform_scaling_invariance():
    rng = np.random.default_rng(9)
    train = rng.standard_normal((30, 4))
    labels = rng.choice(["x", "y"], size=30)
    queries = rng.standard_normal((15, 4))
    base = KnnClassifier().fit(train, labels).predict_for_ks(queries, [1, 3, 7])
    scaled = KnnClassifier().fit(train * 3.7, labels).predict_for_ks(queries * 3.7, [1, 3, 7])
    assert base == scaled


def test_sparse_doc_vectors():
    train = [DocVector.from_row(sp.csr_matrix([[1.0, 0.0, 0.0]])), DocVector.from_row(sp.csr_matrix([[0.0, 0.0, 1.0]]))]
    query = DocVector.from_row(sp.csr_matrix([[0.9, 0.1, 0.0]]))
    assert knn_predict(train, ["first", "last"], query, k=1) == "first"


def test_identical_vectors_are_exactly_zero_apart():
    """Near-identical rows are recomputed so duplicates get distance 0."""
    x = np.random.default_rng(4).standard_normal((5, 300)) * 1e3
    for chunk in distance_chunks(x, x, lambda d, start: d):
        assert np.all(np.diag(chunk) == 0.0)


def test_cosine_metric():
    train = np.array([[1.0, 0.0], [0.0, 1.0]])
    clf = KnnClassifier(metric="cosine").fit(train, ["east", "north"])
    assert clf.predict(np.array([[100.0, 1.0]]), 1) == ["east"]
    with pytest.raises(ParameterError):
        KnnClassifier(metric="manhattan").fit(train, ["e", "n"]).predict(np.array([[1.0, 0.0]]), 1)
