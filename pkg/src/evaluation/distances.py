# src/evaluation/distances.py

"""
Chunked pairwise distances over sparse or dense document vectors.

Euclidean distances come from scikit-learn's dot-product formulation, which
loses precision for (near-)identical vectors. Pairs whose distance falls
under a relative floor are recomputed from the explicit difference, so that
identical documents are exactly 0 apart.
"""

from typing import Any, Callable, Iterator, Optional

import numpy as np
import scipy.sparse as sp
from sklearn.metrics import pairwise_distances_chunked
from sklearn.utils.extmath import row_norms

from src.exceptions import ParameterError

METRICS = ("euclidean", "cosine")

# Squared distances below this fraction of |x|^2 + |y|^2 are recomputed exactly
REFINE_RELATIVE = 1e-10


def _exact_euclidean(x, y, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    if sp.issparse(x):
        diff = sp.csr_matrix(x[rows]) - sp.csr_matrix(y[cols])
        return np.sqrt(np.asarray(diff.multiply(diff).sum(axis=1)).ravel())
    return np.linalg.norm(np.asarray(x)[rows] - np.asarray(y)[cols], axis=1)


def distance_chunks(
    x,
    y,
    reduce: Callable[[np.ndarray, int], Any],
    metric: str = "euclidean",
    working_memory: Optional[int] = None,
) -> Iterator[Any]:
    """
    Yields `reduce(D_chunk, start)` over row chunks of the x-to-y distances.

    Args:
        x: Query rows (CSR or ndarray).
        y: Reference rows of the same kind and width.
        reduce: Called with a distance block for rows start..start+len and the
                index of its first row.
        metric: "euclidean" or "cosine".
        working_memory: Chunk budget in MiB, scikit-learn's default when None.
    """
    if metric not in METRICS:
        raise ParameterError(f"unknown metric '{metric}', expected one of {METRICS}")
    if x.shape[1] != y.shape[1]:
        raise ParameterError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")

    sq_x = row_norms(x, squared=True)
    sq_y = row_norms(y, squared=True)

    def refine(chunk: np.ndarray, start: int):
        if metric == "euclidean":
            stop = start + chunk.shape[0]
            floor = REFINE_RELATIVE * (sq_x[start:stop, None] + sq_y[None, :])
            r, c = np.nonzero(chunk * chunk <= floor)
            if len(r):
                chunk = chunk.copy()
                chunk[r, c] = _exact_euclidean(x, y, r + start, c)
        return reduce(chunk, start)

    yield from pairwise_distances_chunked(x, y, reduce_func=refine, metric=metric, working_memory=working_memory)
