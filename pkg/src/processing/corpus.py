# src/processing/corpus.py

"""
Corpus construction and term statistics.

A `Corpus` is built once from labelled documents and is immutable afterwards.
It holds the vocabulary in first-occurrence order, the sparse document-term
count matrix f(w, d), the document frequencies df(w), N and M.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.exceptions import DatasetError
from src.processing.text_processor import tokenize
from src.utils.provenance import vocabulary_hash

logger = logging.getLogger(__name__)

# (id, label, raw text) as produced by dataset loaders
RawDocument = Tuple[str, str, str]


@dataclass(frozen=True)
class Document:
    """A preprocessed, labelled document."""

    id: str
    tokens: Tuple[str, ...]
    label: str


@dataclass(frozen=True, eq=False)
class Corpus:
    """
    Labelled documents plus their term statistics.

    Attributes:
        documents: Documents in input order.
        vocabulary: Unique tokens in first-occurrence order (size M).
        term_counts: CSR matrix of shape (N, M); entry (i, j) is f(w_j, d_i).
        doc_freq: df(w) per vocabulary index.
        class_set: Distinct labels, sorted.
    """

    documents: Tuple[Document, ...]
    vocabulary: Tuple[str, ...]
    term_counts: sp.csr_matrix
    doc_freq: np.ndarray
    class_set: Tuple[str, ...]
    word_index: Dict[str, int] = field(repr=False, compare=False)
    doc_index: Dict[str, int] = field(repr=False, compare=False)

    @classmethod
    def from_documents(cls, documents: Sequence[Document]) -> "Corpus":
        """
        Builds the corpus statistics for already tokenized documents.

        Raises:
            DatasetError: On zero documents, duplicate ids or empty labels.
        """
        if not documents:
            raise DatasetError("cannot build a corpus from zero documents")

        doc_index: Dict[str, int] = {}
        word_index: Dict[str, int] = {}
        rows: List[int] = []
        cols: List[int] = []
        counts: List[int] = []

        for i, doc in enumerate(documents):
            if doc.id in doc_index:
                raise DatasetError(f"duplicate document id '{doc.id}'")
            if not doc.label:
                raise DatasetError(f"document '{doc.id}' has an empty label")
            doc_index[doc.id] = i
            for token in doc.tokens:
                if token not in word_index:
                    word_index[token] = len(word_index)
            for token, count in Counter(doc.tokens).items():
                rows.append(i)
                cols.append(word_index[token])
                counts.append(count)

        n, m = len(documents), len(word_index)
        term_counts = sp.csr_matrix(
            (np.array(counts, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(n, m),
        )
        term_counts.sort_indices()
        doc_freq = np.diff(term_counts.tocsc().indptr).astype(np.int64)

        corpus = cls(
            documents=tuple(documents),
            vocabulary=tuple(word_index),
            term_counts=term_counts,
            doc_freq=doc_freq,
            class_set=tuple(sorted({doc.label for doc in documents})),
            word_index=word_index,
            doc_index=doc_index,
        )
        empty = int(np.sum(corpus.doc_lengths == 0))
        if empty:
            logger.info(f"{empty} document(s) are empty after preprocessing and will get zero vectors")
        logger.info(f"Built corpus: N={corpus.n_docs}, M={corpus.m}, classes={len(corpus.class_set)}")
        return corpus

    @property
    def n_docs(self) -> int:
        """N, the number of documents."""
        return len(self.documents)

    @property
    def m(self) -> int:
        """M, the vocabulary size."""
        return len(self.vocabulary)

    @property
    def labels(self) -> List[str]:
        return [doc.label for doc in self.documents]

    @property
    def doc_ids(self) -> List[str]:
        return [doc.id for doc in self.documents]

    @property
    def doc_lengths(self) -> np.ndarray:
        """Token count per document, sum of f(w, d) over w."""
        return np.asarray(self.term_counts.sum(axis=1)).ravel().astype(np.int64)

    @property
    def vocabulary_hash(self) -> bytes:
        return vocabulary_hash(self.vocabulary)

    def position(self, doc_or_id) -> int:
        """Row index of a document given the Document, its id or its index."""
        if isinstance(doc_or_id, (int, np.integer)):
            if not 0 <= doc_or_id < self.n_docs:
                raise IndexError(f"document index {doc_or_id} out of range")
            return int(doc_or_id)
        doc_id = doc_or_id.id if isinstance(doc_or_id, Document) else doc_or_id
        try:
            return self.doc_index[doc_id]
        except KeyError:
            raise KeyError(f"document '{doc_id}' is not in the corpus") from None


def build_corpus(
    docs: Iterable[RawDocument],
    stopwords: Iterable[str] = (),
    min_token_len: int = 1,
) -> Corpus:
    """
    Tokenizes raw labelled documents and builds the corpus.

    Args:
        docs: (id, label, raw text) records.
        stopwords: Stopword set applied during tokenization.
        min_token_len: Minimum kept token length.

    Returns:
        Corpus: The immutable corpus with vocabulary in first-occurrence order.
    """
    stop = set(stopwords)
    documents = [
        Document(id=str(doc_id), tokens=tuple(tokenize(raw, stop, min_token_len)), label=str(label))
        for doc_id, label, raw in docs
    ]
    return Corpus.from_documents(documents)


def subset_labels(corpus: Corpus, indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Labels of the documents at `indices` (all documents when None) as an array."""
    labels = np.array(corpus.labels, dtype=object)
    return labels if indices is None else labels[np.asarray(indices, dtype=np.int64)]
