# src/weighting/embedding_average.py

"""
Dense document representations from word embeddings.

- WE-AVG: the mean of the embedding vectors of a document's tokens, with
  token multiplicity respected and unknown tokens skipped.
- SIF: the same average with each token weighted by a / (a + p(w)), followed
  by removal of the first singular direction of the training documents.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.embeddings.loader import EmbeddingTable
from src.exceptions import DatasetError, ParameterError
from src.processing.corpus import Corpus

logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-10
POWER_MAX_ITERATIONS = 1000


def _indices(corpus: Corpus, doc_indices: Optional[Sequence[int]]) -> np.ndarray:
    if doc_indices is None:
        return np.arange(corpus.n_docs, dtype=np.int64)
    return np.asarray(doc_indices, dtype=np.int64)


def vocabulary_embeddings(corpus: Corpus, emb: EmbeddingTable) -> Tuple[np.ndarray, np.ndarray]:
    """
    Embedding rows aligned with the corpus vocabulary.

    Returns:
        (W, known): W has shape (M, dim) with zero rows for unknown words;
        known flags the words that have an embedding.
    """
    rows = emb.rows_for(corpus.vocabulary)
    known = rows >= 0
    vectors = np.zeros((corpus.m, emb.dim), dtype=np.float64)
    vectors[known] = emb.vectors[rows[known]]
    return vectors, known


def _weighted_average(
    corpus: Corpus,
    emb: EmbeddingTable,
    doc_indices: Optional[Sequence[int]],
    word_weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    vectors, known = vocabulary_embeddings(corpus, emb)
    counts = sp.csr_matrix(corpus.term_counts[_indices(corpus, doc_indices)], dtype=np.float64)
    if word_weights is not None:
        vectors = vectors * word_weights[:, None]

    sums = np.asarray(counts @ vectors)
    found = np.asarray(counts @ known.astype(np.float64)).ravel()
    out = np.zeros_like(sums)
    has = found > 0
    out[has] = sums[has] / found[has, None]

    lengths = np.asarray(counts.sum(axis=1)).ravel()
    all_unknown = int(np.sum((lengths > 0) & ~has))
    if all_unknown:
        logger.warning(f"{all_unknown} document(s) have no token with an embedding and get zero vectors")
    return out


def we_avg_matrix(corpus: Corpus, emb: EmbeddingTable, doc_indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Unweighted mean embedding per document, shape (n, dim)."""
    return _weighted_average(corpus, emb, doc_indices)


def we_avg_vector(tokens: Sequence[str], emb: EmbeddingTable) -> np.ndarray:
    """Mean embedding of a token list; zero when no token is known."""
    rows = [r for r in emb.rows_for(list(tokens)) if r >= 0]
    if not rows:
        if tokens:
            logger.warning(f"none of {len(tokens)} token(s) has an embedding, returning a zero vector")
        return np.zeros(emb.dim, dtype=np.float64)
    return emb.vectors[rows].mean(axis=0)


def word_probabilities(corpus: Corpus, doc_indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Relative token frequency p(w) over the given documents."""
    counts = corpus.term_counts[_indices(corpus, doc_indices)]
    totals = np.asarray(counts.sum(axis=0), dtype=np.float64).ravel()
    total = totals.sum()
    return totals / total if total > 0 else totals


def power_iteration(
    x: np.ndarray,
    seed: int = 0,
    tol: float = POWER_TOLERANCE,
    max_iter: int = POWER_MAX_ITERATIONS,
) -> np.ndarray:
    """
    Dominant right singular vector of `x` (top eigenvector of x^T x).

    Starts from a seeded Gaussian vector and stops once successive unit
    iterates differ by less than `tol`.

    Returns:
        A unit vector, or the zero vector when x is zero.
    """
    x = np.asarray(x, dtype=np.float64)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(x.shape[1])
    u /= np.linalg.norm(u)
    for _ in range(max_iter):
        w = x.T @ (x @ u)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            logger.warning("power iteration on a zero matrix, no direction removed")
            return np.zeros(x.shape[1], dtype=np.float64)
        w /= norm
        if np.linalg.norm(w - u) < tol:
            return w
        u = w
    logger.warning(f"power iteration did not converge within {max_iter} iterations")
    return u


@dataclass(frozen=True)
class SifModel:
    """
    SIF statistics fitted on training documents.

    Attributes:
        alpha: Smoothing constant a.
        word_probs: p(w) per vocabulary word.
        direction: The removed first singular direction u.
    """

    alpha: float
    word_probs: np.ndarray
    direction: np.ndarray

    @classmethod
    def fit(
        cls,
        corpus: Corpus,
        emb: EmbeddingTable,
        alpha: float,
        train_indices: Optional[Sequence[int]] = None,
        word_probs: Optional[np.ndarray] = None,
        seed: int = 0,
    ) -> "SifModel":
        """
        Raises:
            ParameterError: If alpha is not positive.
            DatasetError: If the training split is empty.
        """
        if alpha <= 0:
            raise ParameterError(f"SIF alpha must be positive, got {alpha}")
        idx = _indices(corpus, train_indices)
        if len(idx) == 0:
            raise DatasetError("SIF needs at least one training document")
        probs = word_probabilities(corpus, idx) if word_probs is None else np.asarray(word_probs, dtype=np.float64)
        weighted = _weighted_average(corpus, emb, idx, alpha / (alpha + probs))
        return cls(alpha=float(alpha), word_probs=probs, direction=power_iteration(weighted, seed=seed))

    def transform(self, corpus: Corpus, emb: EmbeddingTable, doc_indices: Optional[Sequence[int]] = None) -> np.ndarray:
        weighted = _weighted_average(corpus, emb, doc_indices, self.alpha / (self.alpha + self.word_probs))
        u = self.direction
        return weighted - np.outer(weighted @ u, u)


def sif_vectors(
    corpus: Corpus,
    emb: EmbeddingTable,
    alpha: float,
    train_indices: Optional[Sequence[int]] = None,
    apply_indices: Optional[Sequence[int]] = None,
    word_probs: Optional[np.ndarray] = None,
    seed: int = 0,
) -> np.ndarray:
    """Fits SIF on `train_indices` and embeds `apply_indices`, shape (n, dim)."""
    model = SifModel.fit(corpus, emb, alpha, train_indices, word_probs=word_probs, seed=seed)
    return model.transform(corpus, emb, apply_indices)
