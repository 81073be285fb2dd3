# src/__init__.py

"""
Initializes the 'src' directory as the main Python package for the cptw toolkit.

The toolkit turns pretrained word embeddings plus a labelled corpus into
contextually propagated bag-of-words document vectors (CPTW and CPTW_IDF),
compares them against classical term-weighting baselines with a kNN
cross-validation harness, and reports the inter-vs-intra class ratio (IICR)
as a threshold diagnostic.

Sub-packages:
- src.embeddings: pretrained embedding loading and cosine similarity.
- src.processing: tokenization, corpus statistics and dataset ingestion.
- src.propagation: the thresholded similarity graph and propagation matrix.
- src.weighting: document vectors for every supported scheme.
- src.evaluation: kNN, F1 metrics, cross-validation and IICR.
"""

__version__ = "0.1.0"
__author__ = "cptw developers"

TOOL_NAME = "cptw"
