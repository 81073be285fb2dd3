# src/propagation/matrix_io.py

"""
Reads and writes propagation matrix files.

Layout, all little-endian:

    magic        8 bytes   b"CPTWSIM1"
    m            u64
    tau          f64
    vocab hash   32 bytes
    alphas       m x f64
    row offsets  (m + 1) x u64
    columns      nnz x u64
    values       nnz x f64

The round trip is exact. A `<path>.json` sidecar carries the provenance.
"""

import logging
import struct
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp

from src.exceptions import MatrixFileError
from src.propagation.similarity_graph import PropagationMatrix
from src.utils.provenance import write_sidecar

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MATRIX_MAGIC = b"CPTWSIM1"
HASH_BYTES = 32
_HEADER = struct.Struct("<8sQd32s")


def save_matrix(p: PropagationMatrix, path: PathLike, params: Optional[Mapping[str, Any]] = None) -> Path:
    """
    Writes a propagation matrix and its provenance sidecar.

    Args:
        p: The matrix to store.
        path: Destination file; parent directories are created.
        params: Resolved run parameters recorded in the sidecar.

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix = p.matrix
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MATRIX_MAGIC, p.m, p.tau, p.vocab_hash))
        f.write(np.asarray(p.alphas, dtype="<f8").tobytes())
        f.write(np.asarray(matrix.indptr, dtype="<u8").tobytes())
        f.write(np.asarray(matrix.indices, dtype="<u8").tobytes())
        f.write(np.asarray(matrix.data, dtype="<f8").tobytes())

    write_sidecar(
        path,
        dict(params or {}, tau=p.tau),
        kind="propagation-matrix",
        m=p.m,
        nnz=p.nnz,
        vocabulary_hash=p.vocab_hash.hex(),
    )
    logger.info(f"Saved propagation matrix ({p.m} rows, {p.nnz} entries) to {path}")
    return path


def _take(buffer: bytes, offset: int, count: int, dtype: str, path: Path, what: str):
    size = np.dtype(dtype).itemsize * count
    if offset + size > len(buffer):
        raise MatrixFileError(f"{path}: truncated file while reading {what}")
    return np.frombuffer(buffer, dtype=dtype, count=count, offset=offset), offset + size


def load_matrix(path: PathLike, vocab_hash: Optional[bytes] = None) -> PropagationMatrix:
    """
    Reads a propagation matrix file.

    Args:
        path: The matrix file.
        vocab_hash: If given, the vocabulary hash of the corpus the matrix is
                    about to be applied to.

    Raises:
        FileNotFoundError: If the file does not exist.
        MatrixFileError: On a wrong magic, truncation or inconsistent offsets.
        VocabularyMismatchError: If `vocab_hash` differs from the stored hash.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found at '{path}'")
    buffer = path.read_bytes()

    if len(buffer) < _HEADER.size or buffer[:len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise MatrixFileError(f"{path}: not a propagation matrix file")
    _, m, tau, stored_hash = _HEADER.unpack_from(buffer, 0)

    offset = _HEADER.size
    alphas, offset = _take(buffer, offset, m, "<f8", path, "alphas")
    indptr, offset = _take(buffer, offset, m + 1, "<u8", path, "row offsets")
    nnz = int(indptr[-1])
    if indptr[0] != 0 or np.any(np.diff(indptr.astype(np.int64)) < 0):
        raise MatrixFileError(f"{path}: row offsets are not monotone")
    indices, offset = _take(buffer, offset, nnz, "<u8", path, "column indices")
    values, offset = _take(buffer, offset, nnz, "<f8", path, "values")
    if offset != len(buffer):
        raise MatrixFileError(f"{path}: {len(buffer) - offset} trailing bytes after the matrix")
    if nnz and int(indices.max()) >= m:
        raise MatrixFileError(f"{path}: column index out of range")

    matrix = sp.csr_matrix(
        (values.astype(np.float64), indices.astype(np.int64), indptr.astype(np.int64)),
        shape=(m, m),
    )
    p = PropagationMatrix(tau=float(tau), matrix=matrix, alphas=alphas.astype(np.float64), vocab_hash=stored_hash)
    if vocab_hash is not None:
        p.ensure_vocabulary(vocab_hash)
    logger.info(f"Loaded propagation matrix ({m} rows, {nnz} entries, tau={tau}) from {path}")
    return p
