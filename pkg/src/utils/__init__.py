# src/utils/__init__.py

"""
Initializes the 'utils' sub-package.

Holds helpers used by several other packages that do not belong to a single
domain: deterministic dataset file discovery and output provenance (config
digests, vocabulary hashes, number formatting).
"""

from .file_utils import find_class_dirs, find_document_files
from .provenance import config_digest, fmt, provenance, vocabulary_hash

__all__ = [
    "find_class_dirs",
    "find_document_files",
    "config_digest",
    "fmt",
    "provenance",
    "vocabulary_hash",
]
