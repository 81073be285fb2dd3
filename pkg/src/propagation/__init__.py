# src/propagation/__init__.py

"""
Similarity graph construction and the propagation matrix.
"""

from src.propagation.matrix_io import load_matrix, save_matrix
from src.propagation.similarity_graph import (
    MIN_TAU,
    PropagationMatrix,
    SimilarityMatrix,
    build_propagation,
    build_similarity,
    resolve_tau,
    row_normalize,
)

__all__ = [
    "MIN_TAU",
    "PropagationMatrix",
    "SimilarityMatrix",
    "build_propagation",
    "build_similarity",
    "load_matrix",
    "resolve_tau",
    "row_normalize",
    "save_matrix",
]
