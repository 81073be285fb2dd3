# src/embeddings/loader.py

"""
Loads pretrained word embeddings and serves vocabulary lookups.

Two on-disk formats are supported:

- text:   one "token x1 ... xd" line per word, with an optional
          "count dim" header line;
- binary: the classic word2vec layout, an ASCII "<count> <dim>\\n" header
          followed by, per word, the token bytes, a space, `dim`
          little-endian float32 values and an optional newline.

Every stored vector is scaled to unit Euclidean length at load time, so the
cosine similarity of two stored vectors is just their dot product.
"""

import logging
from pathlib import Path
from typing import Collection, Dict, List, Optional, Sequence, Union

import numpy as np

from src.exceptions import EmbeddingFormatError, ParameterError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Bytes pulled from a binary embedding file per read
BINARY_CHUNK_SIZE = 1 << 20

EMBEDDING_FORMATS = ("text", "binary")


class EmbeddingTable:
    """
    An immutable, vocabulary-indexed matrix of unit-length word vectors.

    Attributes:
        words (List[str]): Unique tokens in row order.
        dim (int): Vector dimensionality.
        vectors (np.ndarray): Read-only float64 array of shape (len(words), dim).
        index (Dict[str, int]): Token to row position.
    """

    def __init__(self, words: List[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ValueError(f"vectors shape {vectors.shape} does not match {len(words)} words")
        if vectors.shape[1] < 1:
            raise ValueError("embedding dimensionality must be at least 1")

        index: Dict[str, int] = {}
        for row, word in enumerate(words):
            if word in index:
                raise ValueError(f"duplicate token '{word}' at rows {index[word]} and {row}")
            index[word] = row

        # Case-folded view, first occurrence wins, used when the exact token is absent
        lower_index: Dict[str, int] = {}
        for row, word in enumerate(words):
            lower_index.setdefault(word.lower(), row)

        vectors = vectors.copy()
        vectors.flags.writeable = False

        self.words = list(words)
        self.dim = int(vectors.shape[1])
        self.vectors = vectors
        self.index = index
        self._lower_index = lower_index

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return self.lookup(token) is not None

    def lookup(self, token: str) -> Optional[int]:
        """
        Finds the row for a token.

        The exact token is tried first; failing that, the first embedding word
        whose lower-cased form equals the lower-cased token.

        Returns:
            The row index, or None if the token has no embedding.
        """
        row = self.index.get(token)
        if row is None:
            row = self._lower_index.get(token.lower())
        return row

    def vector(self, token: str) -> Optional[np.ndarray]:
        """The unit vector of a token, or None when it is out of vocabulary."""
        row = self.lookup(token)
        return None if row is None else self.vectors[row]

    def rows_for(self, tokens: Sequence[str]) -> np.ndarray:
        """Row indices for `tokens`, -1 where a token has no embedding."""
        return np.array([-1 if (r := self.lookup(t)) is None else r for t in tokens], dtype=np.int64)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """
    Cosine similarity of two unit-length vectors.

    Because both inputs are unit length the similarity equals their dot
    product; the result is clipped into [-1, 1] to absorb rounding.

    Raises:
        ParameterError: If the vectors differ in dimensionality.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ParameterError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(1.0, max(-1.0, np.dot(a, b))))


def _keep(token: str, restrict_to: Optional[Collection[str]]) -> bool:
    return restrict_to is None or token in restrict_to or token.lower() in restrict_to


class _TableBuilder:
    """Accumulates parsed rows, dropping duplicates and zero vectors."""

    def __init__(self, source: PathLike):
        self.source = source
        self.words: List[str] = []
        self.rows: List[np.ndarray] = []
        self.seen: set = set()
        self.duplicates = 0
        self.zero_norm = 0

    def add(self, token: str, values: np.ndarray) -> None:
        # A rejected row still claims its token; later rows for it are duplicates
        if token in self.seen:
            self.duplicates += 1
            return
        self.seen.add(token)
        norm = float(np.linalg.norm(values))
        if norm == 0.0 or not np.isfinite(norm):
            self.zero_norm += 1
            return
        self.words.append(token)
        self.rows.append(np.asarray(values, dtype=np.float64) / norm)

    def build(self, dim: int) -> EmbeddingTable:
        if self.duplicates:
            logger.warning(f"{self.source}: kept first occurrence of {self.duplicates} duplicate token(s)")
        if self.zero_norm:
            logger.warning(f"{self.source}: rejected {self.zero_norm} zero-norm vector(s)")
        matrix = np.vstack(self.rows) if self.rows else np.zeros((0, dim), dtype=np.float64)
        table = EmbeddingTable(self.words, matrix)
        logger.info(f"Loaded {len(table)} embeddings of dimension {dim} from {self.source}")
        return table


def _is_int(field: str) -> bool:
    try:
        int(field)
    except ValueError:
        return False
    return True


def load_text(path: PathLike, restrict_to: Optional[Collection[str]] = None) -> EmbeddingTable:
    """
    Parses a whitespace-separated text embedding file.

    Args:
        path: The embedding file.
        restrict_to: Optional vocabulary; rows whose token (or lower-cased
                     token) is not in it are skipped after validation.

    Returns:
        EmbeddingTable: Table of unit-normalized vectors.

    Raises:
        EmbeddingFormatError: On inconsistent dimensionality, unparsable
                              numbers or bytes that are not UTF-8, naming
                              the offending line.
    """
    builder = _TableBuilder(path)
    dim: Optional[int] = None
    declared_count: Optional[int] = None
    entries = 0

    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise EmbeddingFormatError(f"{path}: line {line_no}: not valid UTF-8 ({e})") from e
            fields = line.split()
            if not fields:
                continue
            if line_no == 1 and len(fields) == 2 and _is_int(fields[0]) and _is_int(fields[1]):
                declared_count, dim = int(fields[0]), int(fields[1])
                if dim < 1:
                    raise EmbeddingFormatError(f"{path}: line 1: header dimension must be positive")
                continue

            token, values = fields[0], fields[1:]
            if dim is None:
                if not values:
                    raise EmbeddingFormatError(f"{path}: line {line_no}: token '{token}' has no vector")
                dim = len(values)
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"{path}: line {line_no}: expected {dim} values, found {len(values)}"
                )
            entries += 1
            if not _keep(token, restrict_to):
                continue
            try:
                vector = np.array(values, dtype=np.float64)
            except ValueError as e:
                raise EmbeddingFormatError(f"{path}: line {line_no}: {e}") from e
            builder.add(token, vector)

    if dim is None:
        raise EmbeddingFormatError(f"{path}: no embedding rows found")
    if declared_count is not None and declared_count != entries:
        logger.warning(f"{path}: header declares {declared_count} entries, parsed {entries}")
    return builder.build(dim)


def load_binary(path: PathLike, restrict_to: Optional[Collection[str]] = None) -> EmbeddingTable:
    """
    Parses a word2vec-style binary embedding file.

    Args:
        path: The embedding file.
        restrict_to: Optional vocabulary filter, as for `load_text`.

    Returns:
        EmbeddingTable: Table of unit-normalized vectors.

    Raises:
        EmbeddingFormatError: If the header is not two integers, the file is
                              truncated, or it holds more entries than declared.
    """
    builder = _TableBuilder(path)

    with open(path, "rb") as f:
        header = f.readline()
        fields = header.split()
        if len(fields) != 2 or not all(_is_int(x.decode("ascii", "replace")) for x in fields):
            raise EmbeddingFormatError(f"{path}: header {header[:64]!r} is not '<count> <dim>'")
        count, dim = int(fields[0]), int(fields[1])
        if count < 0 or dim < 1:
            raise EmbeddingFormatError(f"{path}: invalid header counts {count} {dim}")

        record_bytes = 4 * dim
        buf = b""
        pos = 0
        for parsed in range(count):
            while True:
                # Skip the optional newline that ends the previous record
                while pos < len(buf) and buf[pos:pos + 1] in (b"\n", b"\r"):
                    pos += 1
                space = buf.find(b" ", pos)
                if space != -1 and len(buf) - (space + 1) >= record_bytes:
                    break
                more = f.read(BINARY_CHUNK_SIZE)
                if not more:
                    raise EmbeddingFormatError(
                        f"{path}: truncated file, expected {count} entries, found {parsed}"
                    )
                buf = buf[pos:] + more
                pos = 0

            try:
                token = buf[pos:space].decode("utf-8")
            except UnicodeDecodeError as e:
                raise EmbeddingFormatError(f"{path}: entry {parsed + 1}: token is not UTF-8 ({e})") from e
            values = np.frombuffer(buf, dtype="<f4", count=dim, offset=space + 1)
            pos = space + 1 + record_bytes
            if _keep(token, restrict_to):
                builder.add(token, values.astype(np.float64))

        trailing = buf[pos:] + f.read()
        if trailing.strip():
            raise EmbeddingFormatError(f"{path}: header declares {count} entries but the file holds more data")

    return builder.build(dim)


def load_embeddings(
    path: PathLike,
    fmt: Optional[str] = None,
    restrict_to: Optional[Collection[str]] = None,
) -> EmbeddingTable:
    """
    Loads an embedding file, sniffing the format from its extension.

    A `.bin` suffix selects the binary reader; anything else is read as text.
    An explicit `fmt` ("text" or "binary") overrides the sniffing.
    """
    path = Path(path)
    if fmt is None:
        fmt = "binary" if path.suffix.lower() == ".bin" else "text"
    if fmt not in EMBEDDING_FORMATS:
        raise ParameterError(f"unknown embedding format '{fmt}', expected one of {EMBEDDING_FORMATS}")
    if not path.exists():
        raise FileNotFoundError(f"Embedding file not found at '{path}'")
    loader = load_binary if fmt == "binary" else load_text
    return loader(path, restrict_to=restrict_to)
