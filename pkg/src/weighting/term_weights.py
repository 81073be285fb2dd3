# src/weighting/term_weights.py

"""
Sparse document representations over the corpus vocabulary.

Implements the frequency-based schemes (BOW, TF-IDF, BM25) and the
propagated schemes built on a `PropagationMatrix`:

    CPTW(d)     = P  tf(d)
    CPTW_IDF(d) = Q  tf(d),  Q[j, k] = P[j, k] * ln((N / df_k) * P[j, k])

Batch functions (`*_matrix`) return one CSR row per requested document;
the `*_vector` functions are thin single-document wrappers returning a
`DocVector`. Corpus statistics (IDF, BM25 length statistics) are fitted on a
chosen subset of documents so evaluation can keep them train-only.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from src.exceptions import ParameterError
from src.processing.corpus import Corpus
from src.propagation.similarity_graph import PropagationMatrix

logger = logging.getLogger(__name__)

IDF_MODES = ("inside", "outside")


@dataclass(frozen=True)
class DocVector:
    """
    A single document representation.

    Sparse vectors keep strictly increasing `indices` and no explicit zeros;
    dense vectors store every component in `values` with `indices` None.
    """

    kind: str
    dim: int
    values: np.ndarray
    indices: Optional[np.ndarray] = None
    normalized: bool = False

    @classmethod
    def from_row(cls, row, normalized: bool = False) -> "DocVector":
        """Builds a DocVector from a 1 x dim CSR row or a 1-D array."""
        if sp.issparse(row):
            row = sp.csr_matrix(row)
            row.eliminate_zeros()
            row.sort_indices()
            return cls(
                kind="sparse",
                dim=row.shape[1],
                values=row.data.astype(np.float64),
                indices=row.indices.astype(np.int64),
                normalized=normalized,
            )
        values = np.asarray(row, dtype=np.float64).ravel()
        return cls(kind="dense", dim=values.shape[0], values=values, normalized=normalized)

    def to_dense(self) -> np.ndarray:
        if self.kind == "dense":
            return self.values.copy()
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.values
        return out

    def to_row(self):
        """The vector as a 1 x dim CSR row (sparse) or 1 x dim array (dense)."""
        if self.kind == "dense":
            return self.values.reshape(1, -1)
        indptr = np.array([0, len(self.indices)], dtype=np.int64)
        return sp.csr_matrix((self.values, self.indices, indptr), shape=(1, self.dim))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _indices(corpus: Corpus, doc_indices: Optional[Sequence[int]]) -> np.ndarray:
    if doc_indices is None:
        return np.arange(corpus.n_docs, dtype=np.int64)
    return np.asarray(doc_indices, dtype=np.int64)


def _counts(corpus: Corpus, doc_indices: Optional[Sequence[int]]) -> sp.csr_matrix:
    return sp.csr_matrix(corpus.term_counts[_indices(corpus, doc_indices)], dtype=np.float64)


def _clean(matrix) -> sp.csr_matrix:
    matrix = sp.csr_matrix(matrix)
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True)
class IdfTable:
    """
    Inverse document frequencies ln(N / df(w)) fitted on a set of documents.

    Attributes:
        idf: Per-vocabulary-word idf; 0 for words absent from the fitted set.
        known: True where the word occurs in the fitted set.
        n_docs: N of the fitted set.
        scope: Human-readable name of the fitted set, e.g. "all" or "train".
    """

    idf: np.ndarray
    known: np.ndarray
    n_docs: int
    scope: str = "all"

    @classmethod
    def from_corpus(
        cls, corpus: Corpus, doc_indices: Optional[Sequence[int]] = None, scope: Optional[str] = None
    ) -> "IdfTable":
        idx = _indices(corpus, doc_indices)
        if len(idx) == 0:
            raise ParameterError("cannot fit IDF on zero documents")
        counts = corpus.term_counts[idx]
        df = np.diff(sp.csc_matrix(counts).indptr).astype(np.int64)
        known = df > 0
        idf = np.zeros(corpus.m, dtype=np.float64)
        idf[known] = np.log(len(idx) / df[known])
        return cls(idf=idf, known=known, n_docs=len(idx), scope=scope or ("all" if doc_indices is None else "subset"))

    def warn_unknown(self, counts: sp.csr_matrix) -> None:
        """Logs one warning if `counts` uses words this table has not seen."""
        used = np.zeros(len(self.known), dtype=bool)
        used[np.unique(counts.indices)] = True
        unseen = int(np.sum(used & ~self.known))
        if unseen:
            logger.warning(f"{unseen} word(s) do not occur in the '{self.scope}' IDF documents and get idf 0")


@dataclass(frozen=True)
class Bm25Stats:
    """N, df(w) and average document length fitted on a set of documents."""

    n_docs: int
    doc_freq: np.ndarray
    avgdl: float

    @classmethod
    def from_corpus(cls, corpus: Corpus, doc_indices: Optional[Sequence[int]] = None) -> "Bm25Stats":
        idx = _indices(corpus, doc_indices)
        if len(idx) == 0:
            raise ParameterError("cannot fit BM25 statistics on zero documents")
        counts = corpus.term_counts[idx]
        df = np.diff(sp.csc_matrix(counts).indptr).astype(np.int64)
        avgdl = float(corpus.doc_lengths[idx].mean())
        return cls(n_docs=len(idx), doc_freq=df, avgdl=avgdl)

    @property
    def idf(self) -> np.ndarray:
        """Robertson-Sparck-Jones idf with +1 smoothing, always positive."""
        df = self.doc_freq.astype(np.float64)
        return np.log1p((self.n_docs - df + 0.5) / (df + 0.5))


# --- Batch vectorizers ---

def tf_matrix(corpus: Corpus, doc_indices: Optional[Sequence[int]] = None) -> sp.csr_matrix:
    """Raw term frequencies f(w, d)."""
    return _clean(_counts(corpus, doc_indices))


def tfidf_matrix(corpus: Corpus, idf: IdfTable, doc_indices: Optional[Sequence[int]] = None) -> sp.csr_matrix:
    """f(w, d) * ln(N / df(w))."""
    counts = _counts(corpus, doc_indices)
    idf.warn_unknown(counts)
    return _clean(counts @ sp.diags(idf.idf))


def bm25_matrix(
    corpus: Corpus,
    stats: Bm25Stats,
    k1: float,
    b: float,
    doc_indices: Optional[Sequence[int]] = None,
) -> sp.csr_matrix:
    """
    BM25 term weights idf(w) * f (k1 + 1) / (f + k1 (1 - b + b dl / avgdl)).

    Raises:
        ParameterError: If k1 < 0 or b lies outside [0, 1].
    """
    if k1 < 0:
        raise ParameterError(f"k1 must be non-negative, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise ParameterError(f"b must lie in [0, 1], got {b}")

    idx = _indices(corpus, doc_indices)
    counts = _counts(corpus, idx)
    avgdl = stats.avgdl if stats.avgdl > 0 else 1.0
    dl = corpus.doc_lengths[idx].astype(np.float64)
    row_of_entry = np.repeat(np.arange(len(idx)), np.diff(counts.indptr))
    f = counts.data
    norm = k1 * (1.0 - b + b * dl[row_of_entry] / avgdl)
    weights = stats.idf[counts.indices] * f * (k1 + 1.0) / (f + norm)
    out = sp.csr_matrix((weights, counts.indices.copy(), counts.indptr.copy()), shape=counts.shape)
    return _clean(out)


def cptw_matrix(
    corpus: Corpus, p: PropagationMatrix, doc_indices: Optional[Sequence[int]] = None
) -> sp.csr_matrix:
    """
    Contextually propagated term weights, P tf(d) for each document.

    Raises:
        VocabularyMismatchError: If `p` was built over another vocabulary.
    """
    p.ensure_vocabulary(corpus.vocabulary_hash)
    return _clean(_counts(corpus, doc_indices) @ p.matrix.T)


def idf_propagation(p: PropagationMatrix, idf: IdfTable, mode: str = "inside") -> sp.csr_matrix:
    """
    The IDF-carrying propagation matrix Q on P's sparsity pattern.

    Modes:
        inside:  Q[j, k] = P[j, k] * (idf_k + ln P[j, k])
        outside: Q[j, k] = P[j, k] * idf_k

    Raises:
        ParameterError: On an unknown mode or a non-positive entry of P.
    """
    if mode not in IDF_MODES:
        raise ParameterError(f"unknown idf mode '{mode}', expected one of {IDF_MODES}")
    data = p.matrix.data
    if np.any(data <= 0):
        raise ParameterError("propagation matrix has non-positive entries; CPTW_IDF needs tau > 0")
    idf_k = idf.idf[p.matrix.indices]
    weights = data * (idf_k + np.log(data)) if mode == "inside" else data * idf_k
    return sp.csr_matrix((weights, p.matrix.indices.copy(), p.matrix.indptr.copy()), shape=p.matrix.shape)


def cptw_idf_matrix(
    corpus: Corpus,
    p: PropagationMatrix,
    idf: IdfTable,
    doc_indices: Optional[Sequence[int]] = None,
    mode: str = "inside",
) -> sp.csr_matrix:
    """
    Propagated weights carrying a log-scaled IDF factor, Q tf(d).

    Components may be negative and are kept as they are.
    """
    p.ensure_vocabulary(corpus.vocabulary_hash)
    counts = _counts(corpus, doc_indices)
    idf.warn_unknown(counts)
    return _clean(counts @ idf_propagation(p, idf, mode).T)


def l2_normalize_rows(matrix):
    """Scales every row to unit Euclidean length; zero rows stay zero."""
    return normalize(matrix, norm="l2", copy=True)


# --- Single-document wrappers ---

def _single(corpus: Corpus, doc) -> list:
    return [corpus.position(doc)]


def tf_vector(doc, corpus: Corpus) -> DocVector:
    return DocVector.from_row(tf_matrix(corpus, _single(corpus, doc)))


def tfidf_vector(doc, corpus: Corpus, idf: IdfTable) -> DocVector:
    return DocVector.from_row(tfidf_matrix(corpus, idf, _single(corpus, doc)))


def bm25_vector(doc, corpus: Corpus, k1: float, b: float, stats: Optional[Bm25Stats] = None) -> DocVector:
    """BM25 weights of one document; statistics default to the whole corpus."""
    stats = stats or Bm25Stats.from_corpus(corpus)
    return DocVector.from_row(bm25_matrix(corpus, stats, k1, b, _single(corpus, doc)))


def cptw_vector(doc, corpus: Corpus, p: PropagationMatrix) -> DocVector:
    return DocVector.from_row(cptw_matrix(corpus, p, _single(corpus, doc)))


def cptw_idf_vector(doc, corpus: Corpus, p: PropagationMatrix, idf: IdfTable, mode: str = "inside") -> DocVector:
    return DocVector.from_row(cptw_idf_matrix(corpus, p, idf, _single(corpus, doc), mode=mode))


def l2_normalize(v: DocVector) -> DocVector:
    """Unit-length copy of `v`; a zero vector is returned unchanged."""
    norm = v.norm()
    values = v.values / norm if norm > 0 else v.values.copy()
    return DocVector(kind=v.kind, dim=v.dim, values=values, indices=v.indices, normalized=True)
