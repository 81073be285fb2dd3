# src/weighting/vector_io.py

"""
Writes and reads document vector files.

Binary layout, all little-endian:

    magic        8 bytes   b"CPTWVEC1"
    header size  u64
    header       UTF-8 JSON {kind, n_docs, dim, scheme, doc_ids, labels}
    sparse:      row offsets (n_docs + 1) x u64, columns nnz x u64, values nnz x f64
    dense:       n_docs x dim f64, row-major

The CSV form has one row per document: doc_id, label, then one `idx:value`
field per non-zero component.
"""

import csv
import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from src.exceptions import MatrixFileError, ParameterError
from src.utils.provenance import fmt, provenance_comment, write_sidecar

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

VECTOR_MAGIC = b"CPTWVEC1"
VECTOR_FORMATS = ("binary", "csv")


def _check_rows(matrix, doc_ids: Sequence[str], labels: Sequence[str]) -> None:
    if matrix.shape[0] != len(doc_ids) or len(doc_ids) != len(labels):
        raise ParameterError(
            f"{matrix.shape[0]} vectors for {len(doc_ids)} document ids and {len(labels)} labels"
        )


def write_vectors_binary(
    path: PathLike,
    matrix,
    doc_ids: Sequence[str],
    labels: Sequence[str],
    scheme: str,
) -> Path:
    path = Path(path)
    _check_rows(matrix, doc_ids, labels)
    kind = "sparse" if sp.issparse(matrix) else "dense"
    header = json.dumps(
        {
            "kind": kind,
            "n_docs": int(matrix.shape[0]),
            "dim": int(matrix.shape[1]),
            "scheme": scheme,
            "doc_ids": list(doc_ids),
            "labels": list(labels),
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")

    with open(path, "wb") as f:
        f.write(VECTOR_MAGIC)
        f.write(struct.pack("<Q", len(header)))
        f.write(header)
        if kind == "sparse":
            csr = sp.csr_matrix(matrix)
            csr.sort_indices()
            f.write(np.asarray(csr.indptr, dtype="<u8").tobytes())
            f.write(np.asarray(csr.indices, dtype="<u8").tobytes())
            f.write(np.asarray(csr.data, dtype="<f8").tobytes())
        else:
            f.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())
    return path


def read_vectors_binary(path: PathLike) -> Tuple[Dict[str, Any], Union[sp.csr_matrix, np.ndarray]]:
    """
    Returns:
        (header, matrix) where matrix is CSR for sparse files, else an ndarray.

    Raises:
        MatrixFileError: On a wrong magic or truncated content.
    """
    path = Path(path)
    buffer = path.read_bytes()
    if buffer[:len(VECTOR_MAGIC)] != VECTOR_MAGIC or len(buffer) < len(VECTOR_MAGIC) + 8:
        raise MatrixFileError(f"{path}: not a vector file")
    (size,) = struct.unpack_from("<Q", buffer, len(VECTOR_MAGIC))
    offset = len(VECTOR_MAGIC) + 8
    try:
        header = json.loads(buffer[offset:offset + size].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MatrixFileError(f"{path}: unreadable vector header ({e})") from e
    offset += size
    n, dim = header["n_docs"], header["dim"]

    def take(count: int, dtype: str) -> np.ndarray:
        nonlocal offset
        nbytes = count * np.dtype(dtype).itemsize
        if offset + nbytes > len(buffer):
            raise MatrixFileError(f"{path}: truncated vector file")
        out = np.frombuffer(buffer, dtype=dtype, count=count, offset=offset)
        offset += nbytes
        return out

    if header["kind"] == "sparse":
        indptr = take(n + 1, "<u8").astype(np.int64)
        indices = take(int(indptr[-1]), "<u8").astype(np.int64)
        values = take(int(indptr[-1]), "<f8").astype(np.float64)
        matrix = sp.csr_matrix((values, indices, indptr), shape=(n, dim))
    else:
        matrix = take(n * dim, "<f8").astype(np.float64).reshape(n, dim)
    return header, matrix


def write_vectors_csv(
    path: PathLike,
    matrix,
    doc_ids: Sequence[str],
    labels: Sequence[str],
    params: Mapping[str, Any],
) -> Path:
    path = Path(path)
    _check_rows(matrix, doc_ids, labels)
    csr = sp.csr_matrix(matrix)
    csr.eliminate_zeros()
    csr.sort_indices()
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(provenance_comment(params) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["doc_id", "label", "idx:value ..."])
        for i, (doc_id, label) in enumerate(zip(doc_ids, labels)):
            start, stop = csr.indptr[i], csr.indptr[i + 1]
            pairs = [f"{j}:{fmt(v)}" for j, v in zip(csr.indices[start:stop], csr.data[start:stop])]
            writer.writerow([doc_id, label, *pairs])
    return path


def write_vectors(
    path: PathLike,
    matrix,
    doc_ids: Sequence[str],
    labels: Sequence[str],
    scheme: str,
    params: Optional[Mapping[str, Any]] = None,
    fmt_name: str = "binary",
) -> Path:
    """
    Writes document vectors in the requested format.

    Binary files get a `<path>.json` provenance sidecar; CSV files carry the
    provenance as their first comment line.
    """
    if fmt_name not in VECTOR_FORMATS:
        raise ParameterError(f"unknown vector format '{fmt_name}', expected one of {VECTOR_FORMATS}")
    params = dict(params or {}, scheme=scheme)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt_name == "csv":
        write_vectors_csv(path, matrix, doc_ids, labels, params)
    else:
        write_vectors_binary(path, matrix, doc_ids, labels, scheme)
        write_sidecar(path, params, kind="document-vectors", n_docs=int(matrix.shape[0]), dim=int(matrix.shape[1]))
    logger.info(f"Wrote {matrix.shape[0]} '{scheme}' vectors of dimension {matrix.shape[1]} to {path}")
    return path
