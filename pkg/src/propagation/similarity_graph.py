# src/propagation/similarity_graph.py

"""
Builds the thresholded word-to-word similarity graph and its row-normalized
propagation matrix.

For every pair of corpus vocabulary words whose embedding cosine is at least
tau the similarity matrix stores the cosine; every word also keeps a self-loop
of 1.0. Words the embedding does not know keep only the self-loop.

The cosines are computed block by block over the upper triangle and mirrored,
so the stored pattern and values are exactly symmetric. The blocking is fixed
by `block_size` alone, which makes the result identical for any number of
worker threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

import numpy as np
import scipy.sparse as sp

from src.embeddings.loader import EmbeddingTable
from src.exceptions import DatasetError, ParameterError, VocabularyMismatchError
from src.processing.corpus import Corpus

logger = logging.getLogger(__name__)

# A requested tau of exactly 0 is replaced by this value
MIN_TAU = 1e-6

DEFAULT_BLOCK_SIZE = 512


def resolve_tau(tau: float) -> float:
    """
    Validates a similarity threshold.

    Returns:
        The threshold to use; 0 is mapped to MIN_TAU with a warning.

    Raises:
        ParameterError: If tau lies outside [0, 1].
    """
    tau = float(tau)
    if tau == 0.0:
        logger.warning(f"tau=0 is not supported, using tau={MIN_TAU}")
        return MIN_TAU
    if not 0.0 < tau <= 1.0:
        raise ParameterError(f"tau must lie in (0, 1], got {tau}")
    return tau


def _csr(rows: np.ndarray, cols: np.ndarray, values: np.ndarray, m: int) -> sp.csr_matrix:
    matrix = sp.csr_matrix((values, (rows, cols)), shape=(m, m))
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """
    Thresholded cosine similarities over a corpus vocabulary.

    Attributes:
        tau: The threshold every stored off-diagonal value reaches.
        matrix: CSR matrix of shape (M, M) holding cos(v_j, v_k).
        oov_rows: Vocabulary indices without an embedding.
        vocab_hash: Hash of the vocabulary the matrix was built over.
    """

    tau: float
    matrix: sp.csr_matrix
    oov_rows: FrozenSet[int]
    vocab_hash: bytes

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def restrict(self, tau: float) -> "SimilarityMatrix":
        """
        Derives the matrix for a larger threshold by dropping values below it.

        Raises:
            ParameterError: If `tau` is smaller than the threshold this matrix
                            was built with.
        """
        tau = resolve_tau(tau)
        if tau < self.tau:
            raise ParameterError(f"cannot restrict a tau={self.tau} matrix to the smaller tau={tau}")
        coo = self.matrix.tocoo()
        keep = (coo.data >= tau) | (coo.row == coo.col)
        matrix = _csr(coo.row[keep], coo.col[keep], coo.data[keep], self.m)
        return SimilarityMatrix(tau=tau, matrix=matrix, oov_rows=self.oov_rows, vocab_hash=self.vocab_hash)


@dataclass(frozen=True, eq=False)
class PropagationMatrix:
    """
    The row-stochastic propagation matrix P = diag(alpha) S.

    Attributes:
        tau: Threshold of the underlying similarity matrix.
        matrix: CSR matrix of shape (M, M), P[j, k] = alpha_j cos(v_j, v_k).
        alphas: Per-row normalization constants.
        vocab_hash: Hash of the vocabulary the matrix was built over.
    """

    tau: float
    matrix: sp.csr_matrix
    alphas: np.ndarray
    vocab_hash: bytes

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def ensure_vocabulary(self, vocab_hash: bytes) -> None:
        """
        Raises:
            VocabularyMismatchError: If the matrix was built over another vocabulary.
        """
        if vocab_hash != self.vocab_hash:
            raise VocabularyMismatchError(expected=vocab_hash.hex(), actual=self.vocab_hash.hex())

    def equals(self, other: "PropagationMatrix") -> bool:
        """Exact, bit-for-bit comparison."""
        a, b = self.matrix, other.matrix
        return (
            self.tau == other.tau
            and self.vocab_hash == other.vocab_hash
            and a.shape == b.shape
            and np.array_equal(self.alphas, other.alphas)
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )


def _upper_block(
    vectors: np.ndarray, start: int, block_size: int, tau: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairs (r, c) with r < c, r in [start, start + block_size), cos >= tau."""
    n = vectors.shape[0]
    stop = min(start + block_size, n)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    values: List[np.ndarray] = []
    for col_start in range(start, n, block_size):
        col_stop = min(col_start + block_size, n)
        sims = vectors[start:stop] @ vectors[col_start:col_stop].T
        r, c = np.nonzero(sims >= tau)
        r = r + start
        c = c + col_start
        upper = r < c
        r, c = r[upper], c[upper]
        rows.append(r)
        cols.append(c)
        values.append(np.minimum(sims[r - start, c - col_start], 1.0))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(values)


def build_similarity(
    emb: EmbeddingTable,
    corpus: Corpus,
    tau: float,
    block_size: int = DEFAULT_BLOCK_SIZE,
    threads: int = 1,
) -> SimilarityMatrix:
    """
    Builds the tau-thresholded similarity matrix over the corpus vocabulary.

    Args:
        emb: Unit-normalized embeddings.
        corpus: The corpus whose vocabulary indexes rows and columns.
        tau: Threshold in (0, 1]; 0 is mapped to MIN_TAU.
        block_size: Rows and columns per dense product.
        threads: Worker threads over row blocks.

    Raises:
        ParameterError: On an invalid tau, block size or thread count.
        DatasetError: If the corpus vocabulary is empty.
    """
    tau = resolve_tau(tau)
    if block_size < 1:
        raise ParameterError(f"block_size must be positive, got {block_size}")
    if threads < 1:
        raise ParameterError(f"threads must be positive, got {threads}")

    m = corpus.m
    if m == 0:
        raise DatasetError("cannot build a similarity matrix over an empty vocabulary")
    rows_in_emb = emb.rows_for(corpus.vocabulary)
    known = np.flatnonzero(rows_in_emb >= 0)
    oov = frozenset(int(j) for j in np.flatnonzero(rows_in_emb < 0))
    if oov:
        logger.warning(f"{len(oov)} of {m} vocabulary words have no embedding and keep only a self-loop")

    vectors = emb.vectors[rows_in_emb[known]]
    starts = range(0, len(known), block_size)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        blocks = list(executor.map(lambda s: _upper_block(vectors, s, block_size, tau), starts))

    if blocks:
        r = np.concatenate([b[0] for b in blocks])
        c = np.concatenate([b[1] for b in blocks])
        v = np.concatenate([b[2] for b in blocks])
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0, dtype=np.float64)
    r, c = known[r], known[c]

    diagonal = np.arange(m, dtype=np.int64)
    matrix = _csr(
        np.concatenate([r, c, diagonal]),
        np.concatenate([c, r, diagonal]),
        np.concatenate([v, v, np.ones(m)]),
        m,
    )
    logger.info(f"Built similarity matrix at tau={tau}: M={m}, nnz={matrix.nnz}")
    return SimilarityMatrix(tau=tau, matrix=matrix, oov_rows=oov, vocab_hash=corpus.vocabulary_hash)


def row_normalize(sim: SimilarityMatrix) -> PropagationMatrix:
    """Scales every row of the similarity matrix to sum to one."""
    row_sums = np.asarray(sim.matrix.sum(axis=1)).ravel()
    alphas = 1.0 / row_sums
    matrix = sp.csr_matrix(sp.diags(alphas) @ sim.matrix)
    matrix.sort_indices()
    return PropagationMatrix(tau=sim.tau, matrix=matrix, alphas=alphas, vocab_hash=sim.vocab_hash)


def build_propagation(
    emb: EmbeddingTable,
    corpus: Corpus,
    tau: float,
    block_size: int = DEFAULT_BLOCK_SIZE,
    threads: int = 1,
) -> PropagationMatrix:
    """Convenience wrapper: `row_normalize(build_similarity(...))`."""
    return row_normalize(build_similarity(emb, corpus, tau, block_size=block_size, threads=threads))
