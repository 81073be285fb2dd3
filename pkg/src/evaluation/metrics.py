# src/evaluation/metrics.py

"""
Classification scores.

Macro F1 averages over every class present in the truth or the predictions,
with a class scoring 0 when it has neither precision nor recall.
"""

from typing import Sequence

from sklearn.metrics import accuracy_score, f1_score

from src.exceptions import ParameterError


def _check(truth: Sequence, pred: Sequence) -> list:
    if len(truth) != len(pred):
        raise ParameterError(f"{len(truth)} true labels but {len(pred)} predictions")
    if len(truth) == 0:
        raise ParameterError("cannot score zero predictions")
    return sorted(set(truth) | set(pred))


def micro_f1(truth: Sequence, pred: Sequence) -> float:
    labels = _check(truth, pred)
    return float(f1_score(list(truth), list(pred), labels=labels, average="micro", zero_division=0))


def macro_f1(truth: Sequence, pred: Sequence) -> float:
    labels = _check(truth, pred)
    return float(f1_score(list(truth), list(pred), labels=labels, average="macro", zero_division=0))


def accuracy(truth: Sequence, pred: Sequence) -> float:
    _check(truth, pred)
    return float(accuracy_score(list(truth), list(pred)))
