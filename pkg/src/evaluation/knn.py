# src/evaluation/knn.py

"""
k-nearest-neighbour classification with deterministic tie-breaking.

Neighbours are ordered by (distance, training key), where the key is the
document's corpus index; a vote tie goes to the label whose voters have the
smaller total distance, then to the lexicographically smaller label. With
those rules a prediction depends only on the set of (vector, label, key)
triples, never on the order of the training list.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from src.evaluation.distances import distance_chunks
from src.exceptions import ParameterError
from src.weighting.term_weights import DocVector

logger = logging.getLogger(__name__)


def stack_vectors(vectors: Sequence):
    """Stacks DocVectors or 1-D arrays into a CSR matrix or 2-D array."""
    if not len(vectors):
        raise ParameterError("no vectors to stack")
    if isinstance(vectors[0], DocVector):
        rows = [v.to_row() for v in vectors]
        return sp.vstack(rows, format="csr") if vectors[0].kind == "sparse" else np.vstack(rows)
    if sp.issparse(vectors[0]):
        return sp.vstack(vectors, format="csr")
    return np.vstack([np.asarray(v, dtype=np.float64).reshape(1, -1) for v in vectors])


def vote(labels: Sequence, distances: Sequence[float]):
    """Majority label of the given neighbours with the tie rules above."""
    counts: Dict = {}
    totals: Dict = {}
    for label, dist in zip(labels, distances):
        counts[label] = counts.get(label, 0) + 1
        totals[label] = totals.get(label, 0.0) + float(dist)
    return min(counts, key=lambda label: (-counts[label], totals[label], label))


class KnnClassifier:
    """
    Holds a training set and answers queries for one or many values of k.
    """

    def __init__(self, metric: str = "euclidean"):
        self.metric = metric
        self.train = None
        self.labels: Optional[np.ndarray] = None
        self.keys: Optional[np.ndarray] = None

    def fit(self, train, labels: Sequence, keys: Optional[Sequence[int]] = None) -> "KnnClassifier":
        """
        Args:
            train: Training rows (CSR or ndarray).
            labels: One label per row.
            keys: Tie-break key per row (smaller wins); row positions if None.
        """
        n = train.shape[0]
        if n == 0:
            raise ParameterError("kNN needs at least one training vector")
        if len(labels) != n:
            raise ParameterError(f"{n} training vectors but {len(labels)} labels")
        self.train = train
        self.labels = np.asarray(labels, dtype=object)
        self.keys = np.arange(n, dtype=np.int64) if keys is None else np.asarray(keys, dtype=np.int64)
        return self

    def neighbours(self, query, n_neighbors: int):
        """
        The `n_neighbors` nearest training rows for every query row.

        Returns:
            (indices, distances), both of shape (n_queries, n_neighbors).
        """
        keys = self.keys

        def nearest(chunk: np.ndarray, start: int):
            tie = np.broadcast_to(keys, chunk.shape)
            order = np.lexsort((tie, chunk), axis=-1)[:, :n_neighbors]
            return order, np.take_along_axis(chunk, order, axis=1)

        indices, distances = [], []
        for order, dist in distance_chunks(query, self.train, nearest, metric=self.metric):
            indices.append(order)
            distances.append(dist)
        return np.vstack(indices), np.vstack(distances)

    def predict_for_ks(self, query, ks: Sequence[int]) -> Dict[int, List]:
        """
        Predictions for every k in `ks` from a single neighbour search.

        Raises:
            ParameterError: If a k is not in 1..n_train.
        """
        if self.train is None:
            raise ParameterError("classifier is not fitted")
        ks = sorted(set(int(k) for k in ks))
        n_train = self.train.shape[0]
        if not ks or ks[0] < 1 or ks[-1] > n_train:
            raise ParameterError(f"k must lie in 1..{n_train}, got {ks}")

        indices, distances = self.neighbours(query, ks[-1])
        predictions: Dict[int, List] = {k: [] for k in ks}
        for row_idx, row_dist in zip(indices, distances):
            labels = self.labels[row_idx]
            for k in ks:
                predictions[k].append(vote(labels[:k], row_dist[:k]))
        return predictions

    def predict(self, query, k: int) -> List:
        return self.predict_for_ks(query, [k])[k]


def knn_predict(
    train_vectors: Sequence,
    train_labels: Sequence,
    query,
    k: int,
    train_indices: Optional[Sequence[int]] = None,
    metric: str = "euclidean",
):
    """
    Predicts the label of one query vector.

    Args:
        train_vectors: DocVectors or 1-D arrays.
        train_labels: One label per training vector.
        query: A DocVector or 1-D array of the same kind.
        k: Neighbour count, 1 <= k <= len(train_vectors).
        train_indices: Corpus document indices used for distance ties; the
                       numerically smaller index wins. List positions
                       when None.

    Raises:
        ParameterError: On an empty training list, k out of range or
                        non-integer indices.
    """
    if not len(train_vectors):
        raise ParameterError("kNN needs at least one training vector")
    train = stack_vectors(train_vectors)
    keys = None
    if train_indices is not None:
        keys = np.asarray(train_indices)
        if keys.shape != (train.shape[0],) or not np.issubdtype(keys.dtype, np.integer):
            raise ParameterError("train_indices must hold one integer document index per training vector")
    classifier = KnnClassifier(metric=metric).fit(train, train_labels, keys=keys)
    return classifier.predict(stack_vectors([query]), k)[0]
