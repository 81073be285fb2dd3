# src/weighting/__init__.py

"""
Initializes the 'weighting' sub-package.

Sparse schemes (BOW, TF-IDF, BM25, CPTW, CPTW_IDF) live in `term_weights`,
dense embedding averages (WE-AVG, SIF) in `embedding_average`; `schemes`
dispatches by name and `vector_io` writes the results.
"""

from .embedding_average import SifModel, power_iteration, sif_vectors, we_avg_matrix, we_avg_vector
from .schemes import SCHEMES, SchemeContext, apply_normalization, get_scheme, param_grid, parse_schemes
from .term_weights import (
    Bm25Stats,
    DocVector,
    IdfTable,
    bm25_matrix,
    bm25_vector,
    cptw_idf_matrix,
    cptw_idf_vector,
    cptw_matrix,
    cptw_vector,
    l2_normalize,
    l2_normalize_rows,
    tf_matrix,
    tf_vector,
    tfidf_matrix,
    tfidf_vector,
)
from .vector_io import read_vectors_binary, write_vectors

__all__ = [
    "Bm25Stats",
    "DocVector",
    "IdfTable",
    "SCHEMES",
    "SchemeContext",
    "SifModel",
    "apply_normalization",
    "bm25_matrix",
    "bm25_vector",
    "cptw_idf_matrix",
    "cptw_idf_vector",
    "cptw_matrix",
    "cptw_vector",
    "get_scheme",
    "l2_normalize",
    "l2_normalize_rows",
    "param_grid",
    "parse_schemes",
    "power_iteration",
    "read_vectors_binary",
    "sif_vectors",
    "tf_matrix",
    "tf_vector",
    "tfidf_matrix",
    "tfidf_vector",
    "we_avg_matrix",
    "we_avg_vector",
    "write_vectors",
]
