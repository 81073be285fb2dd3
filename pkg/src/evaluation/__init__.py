# src/evaluation/__init__.py

"""
kNN classification, scoring, the cross-validated grid search and the
inter-vs-intra class ratio diagnostic.
"""

from .cross_validation import EvalReport, FoldResult, SchemeResult, Split, cross_validate, make_split
from .iicr import IicrResult, SweepResult, iicr, tau_sweep, write_sweep_csv
from .knn import KnnClassifier, knn_predict, vote
from .metrics import accuracy, macro_f1, micro_f1

__all__ = [
    "EvalReport",
    "FoldResult",
    "IicrResult",
    "KnnClassifier",
    "SchemeResult",
    "Split",
    "SweepResult",
    "accuracy",
    "cross_validate",
    "iicr",
    "knn_predict",
    "macro_f1",
    "make_split",
    "micro_f1",
    "tau_sweep",
    "vote",
    "write_sweep_csv",
]
