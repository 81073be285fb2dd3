# src/embeddings/__init__.py

"""
Initializes the 'embeddings' sub-package.

Parses pretrained word-embedding files (text or word2vec binary), scales every
vector to unit length and serves token lookups and cosine similarities.
"""

from .loader import EmbeddingTable, cosine, load_binary, load_embeddings, load_text

__all__ = ["EmbeddingTable", "cosine", "load_binary", "load_embeddings", "load_text"]
