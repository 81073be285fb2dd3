# src/weighting/schemes.py

"""
Registry of document representation schemes.

Every scheme is fitted on a set of training documents (IDF, BM25 or SIF
statistics never see the documents being represented unless they are part of
the training set) and then applied to any set of documents. Propagation
matrices for the CPTW schemes are built once at the smallest threshold
requested and derived for larger thresholds.
"""

import itertools
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

from src.embeddings.loader import EmbeddingTable
from src.exceptions import ParameterError
from src.processing.corpus import Corpus
from src.propagation.similarity_graph import (
    DEFAULT_BLOCK_SIZE,
    PropagationMatrix,
    SimilarityMatrix,
    build_similarity,
    resolve_tau,
    row_normalize,
)
from src.weighting.embedding_average import SifModel, we_avg_matrix
from src.weighting.term_weights import (
    Bm25Stats,
    IdfTable,
    bm25_matrix,
    cptw_idf_matrix,
    cptw_matrix,
    l2_normalize_rows,
    tf_matrix,
    tfidf_matrix,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scheme:
    """Static description of a representation scheme."""

    name: str
    kind: str
    params: tuple = ()
    needs_embeddings: bool = False


SCHEMES: Dict[str, Scheme] = {
    s.name: s
    for s in (
        Scheme("bow", "sparse"),
        Scheme("tfidf", "sparse"),
        Scheme("bm25", "sparse", params=("k1", "b")),
        Scheme("cptw", "sparse", params=("tau",), needs_embeddings=True),
        Scheme("cptw-idf", "sparse", params=("tau",), needs_embeddings=True),
        Scheme("we-avg", "dense", needs_embeddings=True),
        Scheme("sif", "dense", params=("alpha",), needs_embeddings=True),
    )
}

NORMALIZATIONS = ("l2", "none")


def get_scheme(name: str) -> Scheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise ParameterError(f"unknown scheme '{name}', expected one of {sorted(SCHEMES)}") from None


def parse_schemes(text: str) -> List[str]:
    """Splits a comma-separated scheme list and validates every name."""
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise ParameterError("no scheme given")
    for name in names:
        get_scheme(name)
    return names


def param_grid(name: str, grids: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """
    Representation parameter settings to search for a scheme, in grid order.

    The kNN `k` is not included; it is searched separately for each setting.
    """
    scheme = get_scheme(name)
    axes = []
    for param in scheme.params:
        values = list(grids[param])
        if not values:
            raise ParameterError(f"empty grid for '{param}'")
        if param == "tau":
            values = list(dict.fromkeys(resolve_tau(v) for v in values))
        axes.append(values)
    return [dict(zip(scheme.params, point)) for point in itertools.product(*axes)]


@dataclass
class SchemeContext:
    """
    Shared resources for vectorizing a corpus.

    Attributes:
        corpus: The corpus being represented.
        emb: Embeddings, required by every scheme that `needs_embeddings`.
        idf_mode: CPTW_IDF mode, "inside" or "outside".
        seed: Seed for SIF's power iteration.
        block_size, threads: Similarity matrix construction settings.
        propagation: A precomputed matrix used for every tau it matches.
    """

    corpus: Corpus
    emb: Optional[EmbeddingTable] = None
    idf_mode: str = "inside"
    seed: int = 0
    block_size: int = DEFAULT_BLOCK_SIZE
    threads: int = 1
    propagation: Optional[PropagationMatrix] = None
    _similarity: Optional[SimilarityMatrix] = field(default=None, repr=False)
    _cache: Dict[float, PropagationMatrix] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def prepare(self, taus: Sequence[float]) -> None:
        """Builds the similarity matrix once at the smallest of `taus`."""
        if taus:
            with self._lock:
                self._similarity_at(min(resolve_tau(t) for t in taus))

    def _similarity_at(self, tau: float) -> SimilarityMatrix:
        if self._similarity is None or tau < self._similarity.tau:
            if self.emb is None:
                raise ParameterError("the CPTW schemes need embeddings or a precomputed matrix")
            self._similarity = build_similarity(
                self.emb, self.corpus, tau, block_size=self.block_size, threads=self.threads
            )
        return self._similarity

    def propagation_at(self, tau: float) -> PropagationMatrix:
        """The propagation matrix at `tau`, built or derived on first use."""
        tau = resolve_tau(tau)
        if self.propagation is not None and self.propagation.tau == tau:
            return self.propagation
        with self._lock:
            if tau not in self._cache:
                self._cache[tau] = row_normalize(self._similarity_at(tau).restrict(tau))
            return self._cache[tau]

    def _require_embeddings(self, name: str) -> EmbeddingTable:
        if self.emb is None:
            raise ParameterError(f"scheme '{name}' needs embeddings")
        return self.emb

    def vectorize(
        self,
        name: str,
        params: Mapping[str, Any],
        fit_indices: Optional[Sequence[int]],
        doc_indices: Sequence[int],
    ):
        """
        Represents documents with a scheme fitted on `fit_indices`.

        Args:
            name: Scheme name.
            params: Representation parameters, e.g. {"tau": 0.5}.
            fit_indices: Documents the scheme statistics are fitted on; None
                         means the whole corpus.
            doc_indices: Documents to represent.

        Returns:
            A CSR matrix (sparse schemes) or ndarray (dense schemes), one row
            per document in `doc_indices`.
        """
        corpus = self.corpus
        get_scheme(name)
        scope = "all" if fit_indices is None else "train"
        if name == "bow":
            return tf_matrix(corpus, doc_indices)
        if name == "tfidf":
            return tfidf_matrix(corpus, IdfTable.from_corpus(corpus, fit_indices, scope=scope), doc_indices)
        if name == "bm25":
            stats = Bm25Stats.from_corpus(corpus, fit_indices)
            return bm25_matrix(corpus, stats, params["k1"], params["b"], doc_indices)
        if name == "cptw":
            return cptw_matrix(corpus, self.propagation_at(params["tau"]), doc_indices)
        if name == "cptw-idf":
            idf = IdfTable.from_corpus(corpus, fit_indices, scope=scope)
            return cptw_idf_matrix(corpus, self.propagation_at(params["tau"]), idf, doc_indices, mode=self.idf_mode)
        emb = self._require_embeddings(name)
        if name == "we-avg":
            return we_avg_matrix(corpus, emb, doc_indices)
        model = SifModel.fit(corpus, emb, params["alpha"], fit_indices, seed=self.seed)
        return model.transform(corpus, emb, doc_indices)


def apply_normalization(matrix, mode: str):
    """Applies the distance-time normalization ('l2' or 'none')."""
    if mode not in NORMALIZATIONS:
        raise ParameterError(f"unknown normalization '{mode}', expected one of {NORMALIZATIONS}")
    return l2_normalize_rows(matrix) if mode == "l2" else matrix
