# src/processing/text_processor.py

"""
Implements the text preprocessing pipeline.

Raw text is lower-cased, NFC-composed, split into maximal runs of Unicode
letters and digits (combining marks stay with the letter they follow;
everything else is a separator) and filtered against a stopword list.
The vendored default list is the SMART stopword list.
"""

import logging
import re
import sys
import unicodedata
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Optional, Set, Union

from src.config import DEFAULT_STOPWORDS_PATH

logger = logging.getLogger(__name__)

# Letters and digits in any script; `\w` minus the underscore
TOKEN_PATTERN = re.compile(r"[^\W_]+")


@lru_cache(maxsize=1)
def _unicode_token_pattern() -> re.Pattern:
    """Like TOKEN_PATTERN, but combining marks after a letter or digit stay in the token."""
    ranges = []
    start = prev = None
    for code in range(sys.maxunicode + 1):
        if unicodedata.category(chr(code)).startswith("M"):
            if prev is not None and code == prev + 1:
                prev = code
                continue
            if start is not None:
                ranges.append((start, prev))
            start = prev = code
    if start is not None:
        ranges.append((start, prev))
    marks = "".join(chr(a) if a == b else f"{chr(a)}-{chr(b)}" for a, b in ranges)
    return re.compile(rf"[^\W_](?:[^\W_]|[{marks}])*")


def _split(text: str) -> List[str]:
    if text.isascii():
        return TOKEN_PATTERN.findall(text)
    return _unicode_token_pattern().findall(unicodedata.normalize("NFC", text))


def load_stopwords(path: Union[str, Path, None] = None) -> Set[str]:
    """
    Reads a stopword file with one token per line.

    Blank lines and lines starting with '#' are ignored; entries are
    lower-cased.

    Args:
        path: The stopword file. Defaults to the vendored SMART list.

    Returns:
        The set of stopwords.
    """
    path = Path(path) if path is not None else DEFAULT_STOPWORDS_PATH
    if not path.exists():
        raise FileNotFoundError(f"Stopword file not found at '{path}'")
    with open(path, "r", encoding="utf-8") as f:
        words = {line.strip().lower() for line in f if line.strip() and not line.startswith("#")}
    logger.debug(f"Loaded {len(words)} stopwords from {path}")
    return words


def tokenize(raw: str, stopwords: Iterable[str] = (), min_token_len: int = 1) -> List[str]:
    """
    Tokenizes text into lower-cased alphanumeric tokens without stopwords.

    Order and duplicates are preserved. The text is lower-cased before
    splitting so that re-tokenizing the output yields the same tokens.

    Args:
        raw: Arbitrary Unicode text.
        stopwords: Tokens to drop (compared after lower-casing).
        min_token_len: Tokens shorter than this are dropped.

    Returns:
        The token list, possibly empty.
    """
    if not raw:
        return []
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [
        token
        for token in _split(raw.lower())
        if len(token) >= min_token_len and token not in stop
    ]


class TextProcessor:
    """
    Holds a loaded stopword list and token-length floor for repeated use.
    """

    def __init__(self, stopwords: Optional[Iterable[str]] = None, min_token_len: int = 1):
        """
        Args:
            stopwords: Stopword tokens. Defaults to the vendored SMART list.
            min_token_len: Minimum kept token length (>= 1).
        """
        if min_token_len < 1:
            raise ValueError("min_token_len must be at least 1")
        self.stopwords: Set[str] = load_stopwords() if stopwords is None else {w.lower() for w in stopwords}
        self.min_token_len = min_token_len

    @classmethod
    def from_file(cls, path: Union[str, Path, None], min_token_len: int = 1) -> "TextProcessor":
        return cls(load_stopwords(path), min_token_len=min_token_len)

    def tokenize(self, raw: str) -> List[str]:
        return tokenize(raw, self.stopwords, self.min_token_len)


if __name__ == '__main__':
    processor = TextProcessor()
    for sample in ("The boat is sailing!!", "C3PO/droid", ""):
        print(f"{sample!r:30} -> {processor.tokenize(sample)}")
