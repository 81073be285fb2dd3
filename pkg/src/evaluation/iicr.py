# src/evaluation/iicr.py

"""
Inter-vs-intra class ratio (IICR).

For each point the Euclidean distances to its k nearest points outside its
class and to its k nearest other points inside its class are summed (not
averaged over k). A class's inter and intra distances are the means of those
sums over its points, its ratio is inter / intra, and the IICR is the mean
ratio over classes. Values near 1 mean the classes are hard to separate.

A point never counts as its own intra neighbour. When a class or its
complement has fewer than k candidates the point uses all of them and the
clamp is reported.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.evaluation.distances import distance_chunks
from src.exceptions import DegenerateIicrError, IicrError, ParameterError
from src.propagation.similarity_graph import resolve_tau
from src.utils.provenance import fmt, provenance_comment
from src.weighting.schemes import SchemeContext, apply_normalization

logger = logging.getLogger(__name__)

SWEEP_SCHEMES = ("cptw", "cptw-idf")
SWEEP_COLUMNS = ["tau", "iicr", "class", "inter", "intra", "ratio"]


@dataclass
class IicrResult:
    """
    Attributes:
        k: Requested neighbour count.
        classes: Class names, sorted.
        inter, intra, ratios: Per-class values keyed by class name.
        iicr: Mean of the per-class ratios.
        clamped_points: Points that used fewer than k neighbours on either side.
        tau: Threshold of the representation, when known.
    """

    k: int
    classes: List[str]
    inter: Dict[str, float]
    intra: Dict[str, float]
    ratios: Dict[str, float]
    iicr: float
    clamped_points: int = 0
    tau: Optional[float] = None


def _neighbour_sums(vectors, labels: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray, int]:
    """Per point: summed distance to k nearest inter and intra neighbours."""
    n = len(labels)
    inter_sums = np.zeros(n, dtype=np.float64)
    intra_sums = np.zeros(n, dtype=np.float64)
    clamped = 0

    def reduce(chunk: np.ndarray, start: int):
        nonlocal clamped
        for offset, row in enumerate(chunk):
            i = start + offset
            same = labels == labels[i]
            same[i] = False
            others = ~same
            others[i] = False
            intra = row[same]
            inter = row[others]
            k_intra, k_inter = min(k, len(intra)), min(k, len(inter))
            if k_intra < k or k_inter < k:
                clamped += 1
            intra_sums[i] = np.sort(intra)[:k_intra].sum()
            inter_sums[i] = np.sort(inter)[:k_inter].sum()
        return np.zeros(chunk.shape[0])

    for _ in distance_chunks(vectors, vectors, reduce, metric="euclidean"):
        pass
    return inter_sums, intra_sums, clamped


def iicr(vectors, labels: Sequence[str], k: int, tau: Optional[float] = None) -> IicrResult:
    """
    Computes the IICR of labelled vectors.

    Args:
        vectors: One row per point (CSR or ndarray).
        labels: Class per point.
        k: Neighbour count (>= 1).
        tau: Recorded on the result only.

    Raises:
        IicrError: With fewer than two classes or a class of a single point.
        DegenerateIicrError: If a class has zero intra distance.
    """
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    labels = np.asarray([str(label) for label in labels], dtype=object)
    if vectors.shape[0] != len(labels):
        raise ParameterError(f"{vectors.shape[0]} vectors but {len(labels)} labels")
    classes, counts = np.unique(labels.astype(str), return_counts=True)
    if len(classes) < 2:
        raise IicrError("IICR needs at least two classes")
    singletons = [str(c) for c, size in zip(classes, counts) if size < 2]
    if singletons:
        raise IicrError(f"intra-class distance undefined for single-member class(es): {singletons}")

    inter_sums, intra_sums, clamped = _neighbour_sums(vectors, labels, k)
    if clamped:
        logger.warning(f"{clamped} point(s) have fewer than k={k} neighbours on one side; k was clamped")

    inter: Dict[str, float] = {}
    intra: Dict[str, float] = {}
    ratios: Dict[str, float] = {}
    degenerate = []
    for c in classes:
        members = labels == c
        inter[c] = float(inter_sums[members].mean())
        intra[c] = float(intra_sums[members].mean())
        if intra[c] == 0.0:
            degenerate.append(str(c))
            continue
        ratios[c] = inter[c] / intra[c]
    if degenerate:
        raise DegenerateIicrError(f"zero intra-class distance, ratio is infinite for class(es): {degenerate}")

    return IicrResult(
        k=k,
        classes=[str(c) for c in classes],
        inter=inter,
        intra=intra,
        ratios=ratios,
        iicr=float(np.mean([ratios[c] for c in classes])),
        clamped_points=clamped,
        tau=tau,
    )


@dataclass
class SweepEntry:
    tau: float
    result: Optional[IicrResult] = None
    error: Optional[str] = None


@dataclass
class SweepResult:
    scheme: str
    k: int
    entries: List[SweepEntry] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)


def tau_sweep(
    context: SchemeContext,
    scheme: str,
    taus: Sequence[float],
    k: int,
    fit_indices: Optional[Sequence[int]] = None,
    normalize: str = "l2",
) -> SweepResult:
    """
    IICR of the whole corpus represented at each threshold.

    IDF statistics for "cptw-idf" are fitted on `fit_indices` (all documents
    when None). Errors for a single tau are recorded and the sweep continues.
    """
    if scheme not in SWEEP_SCHEMES:
        raise ParameterError(f"tau sweep supports {SWEEP_SCHEMES}, got '{scheme}'")
    if not taus:
        raise ParameterError("no tau values to sweep")
    corpus = context.corpus
    taus = list(dict.fromkeys(resolve_tau(t) for t in taus))
    context.prepare(taus)
    everything = np.arange(corpus.n_docs, dtype=np.int64)

    result = SweepResult(scheme=scheme, k=k)
    for tau in taus:
        try:
            vectors = context.vectorize(scheme, {"tau": tau}, fit_indices, everything)
            vectors = apply_normalization(vectors, normalize)
            entry = SweepEntry(tau=float(tau), result=iicr(vectors, corpus.labels, k, tau=float(tau)))
            logger.info(f"tau={tau}: IICR={entry.result.iicr:.6g}")
        except IicrError as e:
            logger.warning(f"tau={tau}: {e}")
            entry = SweepEntry(tau=float(tau), error=str(e))
        result.entries.append(entry)
    return result


def write_sweep_csv(path: Union[str, Path], sweep: SweepResult, params: Mapping[str, Any]) -> Path:
    """
    Writes the sweep as CSV with columns tau,iicr,class,inter,intra,ratio.

    Each tau contributes one aggregate row (class `*`) followed by its
    per-class rows; a failed tau has a single aggregate row with iicr `nan`.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(provenance_comment(params) + "\n")
        for key in sorted(sweep.notes):
            f.write(f"# {key}={sweep.notes[key]}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for entry in sweep.entries:
            tau = fmt(entry.tau)
            if entry.result is None:
                writer.writerow([tau, "nan", "*", "", "", "nan"])
                continue
            res = entry.result
            writer.writerow([tau, fmt(res.iicr), "*", "", "", fmt(res.iicr)])
            for c in res.classes:
                writer.writerow([tau, fmt(res.iicr), c, fmt(res.inter[c]), fmt(res.intra[c]), fmt(res.ratios[c])])
    logger.info(f"Wrote IICR sweep ({len(sweep.entries)} tau values) to {path}")
    return path
