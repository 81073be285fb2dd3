# src/evaluation/cross_validation.py

"""
Cross-validated grid search with kNN classification.

For every test fold the remaining folds form a pool that is split several
times into train and validation parts. Every representation setting is
scored on every draw for every k in the k grid; the setting with the best
mean validation micro F1 wins (ties go to the earliest setting in grid
order). The winner is refitted on the whole pool and scored on the test fold.

Scheme statistics (IDF, BM25, SIF) are always fitted on the training part
only. Work items run on a thread pool but results are assembled in a fixed
(fold, draw, setting) order, so reports do not depend on the thread count.
"""

import json
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold, StratifiedKFold, train_test_split
from tqdm import tqdm

from src.evaluation.knn import KnnClassifier
from src.evaluation.metrics import macro_f1, micro_f1
from src.exceptions import EvaluationError, ParameterError
from src.utils.provenance import provenance, round_sig
from src.weighting.schemes import SchemeContext, apply_normalization, get_scheme, param_grid

logger = logging.getLogger(__name__)

MIN_DOCUMENTS = 10
MIN_CLASSES = 2


@dataclass(frozen=True)
class Split:
    """
    Fold assignment for every document plus the seed driving validation draws.
    """

    folds: np.ndarray
    n_folds: int
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def pool_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)

    def validation_draws(
        self, fold: int, labels: np.ndarray, draws: int, fraction: float
    ) -> List[Tuple[np.ndarray, np.ndarray]]:
        """
        Train/validation partitions of the pool of `fold`.

        Draw d uses random_state seed + fold * draws + d and is stratified by
        label unless a class is too small, in which case it falls back to a
        plain shuffled split.
        """
        pool = self.pool_indices(fold)
        out = []
        for draw in range(draws):
            state = self.seed + fold * draws + draw
            try:
                train, val = train_test_split(
                    pool, test_size=fraction, stratify=labels[pool], random_state=state
                )
            except ValueError as e:
                logger.warning(f"fold {fold} draw {draw}: stratified validation split impossible ({e}), using a plain split")
                train, val = train_test_split(pool, test_size=fraction, random_state=state)
            out.append((np.sort(train), np.sort(val)))
        return out


def make_split(
    labels: Sequence[str],
    n_folds: int,
    seed: int,
    assignments: Optional[Sequence[int]] = None,
) -> Split:
    """
    Assigns every document to a fold.

    Folds are stratified by label with seeded shuffling. Classes with fewer
    members than folds cannot be stratified; they are reported in a single
    warning and spread as evenly as possible.

    Args:
        labels: Label per document.
        n_folds: Number of folds (>= 2).
        seed: Shuffling seed.
        assignments: Fixed fold per document, e.g. from a split file.
    """
    labels = np.asarray(labels, dtype=object)
    n = len(labels)
    if assignments is not None:
        folds = np.asarray(assignments, dtype=np.int64)
        n_folds = int(folds.max()) + 1
        if n_folds < 2:
            raise EvaluationError("a split file must define at least two folds")
        return Split(folds=folds, n_folds=n_folds, seed=seed)

    if n_folds < 2:
        raise ParameterError(f"need at least 2 folds, got {n_folds}")
    if n < n_folds:
        raise EvaluationError(f"{n} documents cannot fill {n_folds} folds")

    classes, counts = np.unique(labels.astype(str), return_counts=True)
    small = [str(c) for c, size in zip(classes, counts) if size < n_folds]
    folds = np.zeros(n, dtype=np.int64)
    if len(small) == len(classes):
        logger.warning(f"every class has fewer than {n_folds} documents, folds are not stratified")
        splitter = KFold(n_splits=n_folds, shuffle=True, random_state=seed).split(np.zeros(n))
    else:
        if small:
            logger.warning(
                f"{len(small)} class(es) have fewer than {n_folds} documents and are not stratified: {small}"
            )
        splitter = StratifiedKFold(n_splits=n_folds, shuffle=True, random_state=seed).split(
            np.zeros(n), labels.astype(str)
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for fold, (_, test) in enumerate(splitter):
            folds[test] = fold
    return Split(folds=folds, n_folds=n_folds, seed=seed)


@dataclass
class FoldResult:
    fold: int
    params: Dict[str, Any]
    k: int
    validation_micro_f1: float
    test_micro_f1: float
    test_macro_f1: float
    n_train: int
    n_test: int
    seconds: float = 0.0

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        out = {
            "fold": self.fold,
            "params": {k: round_sig(v) if isinstance(v, float) else v for k, v in self.params.items()},
            "k": self.k,
            "validation_micro_f1": round_sig(self.validation_micro_f1),
            "test_micro_f1": round_sig(self.test_micro_f1),
            "test_macro_f1": round_sig(self.test_macro_f1),
            "n_train": self.n_train,
            "n_test": self.n_test,
        }
        if include_timings:
            out["seconds"] = round_sig(self.seconds)
        return out


@dataclass
class SchemeResult:
    scheme: str
    folds: List[FoldResult] = field(default_factory=list)

    @property
    def mean_micro_f1(self) -> float:
        return float(np.mean([f.test_micro_f1 for f in self.folds]))

    @property
    def mean_macro_f1(self) -> float:
        return float(np.mean([f.test_macro_f1 for f in self.folds]))

    def chosen_ks(self) -> List[int]:
        return [f.k for f in self.folds]


@dataclass
class EvalReport:
    """
    Outcome of a cross-validated evaluation.

    Timings are kept on the object but written only on request so that
    reports of identical runs are byte-identical.
    """

    schemes: List[SchemeResult]
    n_docs: int
    classes: List[str]
    n_folds: int
    seed: int
    settings: Dict[str, Any]
    grids: Dict[str, List[Any]]
    timings: Dict[str, float] = field(default_factory=dict)

    def scheme(self, name: str) -> SchemeResult:
        for result in self.schemes:
            if result.scheme == name:
                return result
        raise KeyError(name)

    def to_dict(self, params: Optional[Mapping[str, Any]] = None, include_timings: bool = False) -> Dict[str, Any]:
        out = {
            "provenance": provenance(dict(params or {}, seed=self.seed)),
            "dataset": {"n_docs": self.n_docs, "n_classes": len(self.classes), "classes": list(self.classes)},
            "n_folds": self.n_folds,
            "seed": self.seed,
            "settings": dict(self.settings),
            "grids": {k: [round_sig(v) if isinstance(v, float) else v for v in vs] for k, vs in self.grids.items()},
            "schemes": [
                {
                    "scheme": r.scheme,
                    "mean_test_micro_f1": round_sig(r.mean_micro_f1),
                    "mean_test_macro_f1": round_sig(r.mean_macro_f1),
                    "folds": [f.to_dict(include_timings) for f in r.folds],
                }
                for r in self.schemes
            ],
        }
        if include_timings:
            out["timings"] = {k: round_sig(v) for k, v in self.timings.items()}
        return out

    def to_json(self, params: Optional[Mapping[str, Any]] = None, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(params, include_timings), indent=2, sort_keys=True) + "\n"


def _score_setting(
    context: SchemeContext,
    scheme: str,
    params: Mapping[str, Any],
    train: np.ndarray,
    query: np.ndarray,
    labels: np.ndarray,
    ks: Sequence[int],
    normalize: str,
    metric: str,
) -> Dict[int, List]:
    """Fits on `train`, returns kNN predictions for `query` per k."""
    vectors = context.vectorize(scheme, params, train, np.concatenate([train, query]))
    vectors = apply_normalization(vectors, normalize)
    n = len(train)
    classifier = KnnClassifier(metric=metric).fit(vectors[:n], labels[train], keys=train)
    return classifier.predict_for_ks(vectors[n:], ks)


def cross_validate(
    context: SchemeContext,
    schemes: Sequence[str],
    grids: Mapping[str, Sequence[Any]],
    seed: int = 0,
    n_folds: int = 5,
    draws: int = 3,
    fraction: float = 0.3,
    normalize: str = "l2",
    metric: str = "euclidean",
    threads: int = 1,
    fold_assignments: Optional[Sequence[int]] = None,
    progress: bool = True,
) -> EvalReport:
    """
    Runs the cross-validated grid search for each scheme.

    Args:
        context: Corpus, embeddings and matrix cache used for vectorizing.
        schemes: Scheme names, evaluated in the given order.
        grids: Values per parameter: "k", "tau", "k1", "b", "alpha".
        seed: Seed for folds and validation draws.
        n_folds: Folds when no fixed assignment is given.
        draws: Train/validation draws per test fold.
        fraction: Validation share of the pool.
        normalize: "l2" or "none", applied before distances.
        metric: "euclidean" or "cosine".
        threads: Worker threads for grid points.
        fold_assignments: Fixed fold per document.
        progress: Show a progress bar.

    Raises:
        EvaluationError: With fewer than two classes or ten documents.
    """
    corpus = context.corpus
    labels = np.asarray(corpus.labels, dtype=object)
    if corpus.n_docs < MIN_DOCUMENTS:
        raise EvaluationError(f"cross-validation needs at least {MIN_DOCUMENTS} documents, got {corpus.n_docs}")
    if len(corpus.class_set) < MIN_CLASSES:
        raise EvaluationError(f"cross-validation needs at least {MIN_CLASSES} classes, got {len(corpus.class_set)}")
    if draws < 1 or not 0.0 < fraction < 1.0:
        raise ParameterError(f"invalid validation settings: draws={draws}, fraction={fraction}")
    ks = sorted(set(int(k) for k in grids["k"]))
    if not ks or ks[0] < 1:
        raise ParameterError(f"k grid must hold positive integers, got {list(grids['k'])}")
    for name in schemes:
        get_scheme(name)

    split = make_split(labels, n_folds, seed, fold_assignments)
    fold_draws = [split.validation_draws(f, labels, draws, fraction) for f in range(split.n_folds)]
    results: List[SchemeResult] = []
    timings: Dict[str, float] = {}
    searched_grids: Dict[str, List[Any]] = {"k": ks}

    bar = tqdm(total=len(schemes) * split.n_folds, desc="evaluate", disable=not progress)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for name in schemes:
            started = time.perf_counter()
            points = param_grid(name, grids)
            for param in get_scheme(name).params:
                searched_grids[param] = list(dict.fromkeys(p[param] for p in points))
            if "tau" in get_scheme(name).params:
                context.prepare([p["tau"] for p in points])

            result = SchemeResult(scheme=name)
            for fold in range(split.n_folds):
                fold_started = time.perf_counter()
                partitions = fold_draws[fold]
                usable = [k for k in ks if k <= min(len(train) for train, _ in partitions)]
                if not usable:
                    raise EvaluationError(f"fold {fold}: training parts are smaller than every k in the grid")
                if len(usable) < len(ks):
                    logger.warning(f"fold {fold}: skipping k > {usable[-1]}, the training part is too small")

                tasks = [(train, val, p) for train, val in partitions for p in points]
                predictions = list(executor.map(
                    lambda t: _score_setting(context, name, t[2], t[0], t[1], labels, usable, normalize, metric),
                    tasks,
                ))

                best: Optional[Tuple[float, int, int]] = None
                for pi in range(len(points)):
                    for k in usable:
                        scores = [
                            micro_f1(labels[val], predictions[d * len(points) + pi][k])
                            for d, (_, val) in enumerate(partitions)
                        ]
                        mean = float(np.mean(scores))
                        if best is None or mean > best[0]:
                            best = (mean, pi, k)

                mean, pi, k = best
                pool, test = split.pool_indices(fold), split.test_indices(fold)
                pred = _score_setting(context, name, points[pi], pool, test, labels, [k], normalize, metric)[k]
                seconds = time.perf_counter() - fold_started
                result.folds.append(FoldResult(
                    fold=fold,
                    params=dict(points[pi]),
                    k=k,
                    validation_micro_f1=mean,
                    test_micro_f1=micro_f1(labels[test], pred),
                    test_macro_f1=macro_f1(labels[test], pred),
                    n_train=len(pool),
                    n_test=len(test),
                    seconds=seconds,
                ))
                logger.info(
                    f"{name} fold {fold}: params={points[pi]} k={k} "
                    f"val={mean:.4f} test micro={result.folds[-1].test_micro_f1:.4f} ({seconds:.1f}s)"
                )
                bar.update(1)

            timings[name] = time.perf_counter() - started
            logger.info(
                f"{name}: mean test micro F1 {result.mean_micro_f1:.4f}, macro F1 {result.mean_macro_f1:.4f}"
            )
            results.append(result)
    bar.close()

    return EvalReport(
        schemes=results,
        n_docs=corpus.n_docs,
        classes=list(corpus.class_set),
        n_folds=split.n_folds,
        seed=seed,
        settings={
            "normalize": normalize,
            "metric": metric,
            "validation_draws": draws,
            "validation_fraction": fraction,
            "idf_mode": context.idf_mode,
            "fixed_folds": fold_assignments is not None,
        },
        grids=searched_grids,
        timings=timings,
    )
