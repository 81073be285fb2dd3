# src/processing/__init__.py

"""
Initializes the 'processing' sub-package.

Turns raw labelled text into the statistics every weighting scheme needs:

1.  **Ingestion**: directory-per-class or `label<TAB>text` datasets, read in a
    deterministic order, plus optional fixed fold assignments.
2.  **Preprocessing**: lower-casing, splitting on non-alphanumeric characters
    and stopword removal (SMART list by default).
3.  **Statistics**: the vocabulary, term counts f(w, d), document frequencies
    df(w), N and M, held by an immutable `Corpus`.
"""

from .corpus import Corpus, Document, build_corpus
from .datasets import load_dataset, load_split_file
from .text_processor import TextProcessor, load_stopwords, tokenize

__all__ = [
    "Corpus",
    "Document",
    "build_corpus",
    "load_dataset",
    "load_split_file",
    "TextProcessor",
    "load_stopwords",
    "tokenize",
]
