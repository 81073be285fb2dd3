# src/app.py

"""
The main application class for the cptw toolkit.

This module contains the CptwApp class, which orchestrates every subcommand:
it validates paths, loads the dataset and embeddings, runs the requested
pipeline stage (matrix building, representation, evaluation, IICR sweep or
the three-sentence demo) and writes outputs with their provenance.
"""

import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
from sklearn.metrics import pairwise_distances

from src.config import config
from src.embeddings.loader import EmbeddingTable, load_embeddings
from src.evaluation.cross_validation import cross_validate, make_split
from src.evaluation.iicr import tau_sweep, write_sweep_csv
from src.exceptions import DatasetError, EvaluationError, ParameterError
from src.processing.corpus import Corpus, build_corpus
from src.processing.datasets import load_dataset, load_split_file
from src.processing.text_processor import load_stopwords
from src.propagation.matrix_io import load_matrix, save_matrix
from src.propagation.similarity_graph import build_propagation, resolve_tau
from src.utils.provenance import fmt, provenance_comment
from src.weighting.schemes import SchemeContext, apply_normalization, get_scheme
from src.weighting.term_weights import cptw_matrix, l2_normalize_rows, tf_matrix
from src.weighting.vector_io import write_vectors

logger = logging.getLogger(__name__)

FIG1_SENTENCES = (
    "The boat is sailing on the sea",
    "The ship was cruising on the ocean",
    "The cat was relaxing on the couch",
)

FIG1_PAIRS = ((0, 1), (0, 2), (1, 2))

# Settings that never change primary outputs and stay out of the config digest
_NON_SEMANTIC = ("threads", "log_level", "out", "include_timings", "progress")


@dataclass
class RunConfig:
    """
    Fully resolved settings of one command-line run.

    Every field that influences an output is part of `params()`, whose digest
    is written into that output.
    """

    command: str
    dataset: Optional[Path] = None
    embeddings: Optional[Path] = None
    embedding_format: Optional[str] = None
    schemes: List[str] = field(default_factory=list)
    tau: float = 0.5
    taus: List[float] = field(default_factory=list)
    k: Optional[int] = None
    k1: float = 1.2
    b: float = 0.75
    alpha: float = 1e-3
    seed: int = 0
    folds: int = 5
    validation_draws: int = 3
    validation_fraction: float = 0.3
    normalize: str = "l2"
    metric: str = "euclidean"
    idf_mode: str = "inside"
    grids: Dict[str, List[Any]] = field(default_factory=dict)
    stopwords: Optional[Path] = None
    min_token_len: int = 1
    block_size: int = 512
    split_file: Optional[Path] = None
    matrix: Optional[Path] = None
    report: Optional[Path] = None
    vector_format: str = "binary"
    out: Optional[Path] = None
    threads: int = 1
    include_timings: bool = False
    log_level: str = "INFO"
    progress: bool = True

    def params(self) -> Dict[str, Any]:
        """The digest-relevant settings as plain values."""
        out: Dict[str, Any] = {}
        for name, value in self.__dict__.items():
            if name in _NON_SEMANTIC:
                continue
            out[name] = str(value) if isinstance(value, Path) else value
        return out


class CptwApp:
    """
    Runs one subcommand for a resolved RunConfig.
    """

    def __init__(self, run: RunConfig):
        self.run_config = run

    # --- Shared loading steps ---

    def validate_paths(self) -> None:
        """
        Checks every input path before any work begins.

        Raises:
            FileNotFoundError: Naming the first missing path.
        """
        run = self.run_config
        for label, path in (
            ("dataset", run.dataset),
            ("embeddings", run.embeddings),
            ("stopword file", run.stopwords),
            ("split file", run.split_file),
            ("matrix", run.matrix),
            ("report", run.report),
        ):
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(f"{label} not found: '{path}'")

    def load_corpus(self) -> Corpus:
        run = self.run_config
        stopwords = load_stopwords(run.stopwords)
        return build_corpus(load_dataset(run.dataset), stopwords, run.min_token_len)

    def load_embeddings(self, corpus: Corpus) -> EmbeddingTable:
        """Loads the embedding rows the corpus vocabulary can use."""
        run = self.run_config
        if run.embeddings is None:
            raise ParameterError(f"'{run.command}' needs --embeddings")
        vocabulary = set(corpus.vocabulary)
        return load_embeddings(run.embeddings, fmt=run.embedding_format, restrict_to=vocabulary)

    def _fold_assignments(self, corpus: Corpus) -> Optional[List[int]]:
        run = self.run_config
        if run.split_file is None:
            return None
        folds = load_split_file(run.split_file, corpus.doc_ids)
        return [folds[doc_id] for doc_id in corpus.doc_ids]

    def _context(self, corpus: Corpus, need_embeddings: bool) -> SchemeContext:
        run = self.run_config
        return SchemeContext(
            corpus=corpus,
            emb=self.load_embeddings(corpus) if need_embeddings else None,
            idf_mode=run.idf_mode,
            seed=run.seed,
            block_size=run.block_size,
            threads=run.threads,
        )

    def _require_out(self) -> Path:
        if self.run_config.out is None:
            raise ParameterError(f"'{self.run_config.command}' needs --out")
        out = Path(self.run_config.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        return out

    # --- Subcommands ---

    def build_sim(self) -> int:
        run = self.run_config
        out = self._require_out()
        corpus = self.load_corpus()
        emb = self.load_embeddings(corpus)
        p = build_propagation(emb, corpus, run.tau, block_size=run.block_size, threads=run.threads)
        save_matrix(p, out, run.params())
        logger.info(f"Propagation matrix has {p.m} rows and {p.nnz} entries")
        return 0

    def represent(self) -> int:
        run = self.run_config
        out = self._require_out()
        name = run.schemes[0]
        scheme = get_scheme(name)
        corpus = self.load_corpus()

        precomputed = run.matrix is not None and "tau" in scheme.params
        context = self._context(corpus, scheme.needs_embeddings and not precomputed)
        if precomputed:
            context.propagation = load_matrix(run.matrix, corpus.vocabulary_hash)
        tau = context.propagation.tau if context.propagation is not None else run.tau
        params = {"tau": tau, "k1": run.k1, "b": run.b, "alpha": run.alpha}

        vectors = context.vectorize(name, params, None, np.arange(corpus.n_docs))
        vectors = apply_normalization(vectors, run.normalize)
        write_vectors(out, vectors, corpus.doc_ids, corpus.labels, name, run.params(), fmt_name=run.vector_format)
        return 0

    def evaluate(self) -> int:
        run = self.run_config
        out = self._require_out()
        corpus = self.load_corpus()
        assignments = self._fold_assignments(corpus)
        needs = any(get_scheme(s).needs_embeddings for s in run.schemes)
        context = self._context(corpus, needs)

        report = cross_validate(
            context,
            run.schemes,
            run.grids,
            seed=run.seed,
            n_folds=run.folds,
            draws=run.validation_draws,
            fraction=run.validation_fraction,
            normalize=run.normalize,
            metric=run.metric,
            threads=run.threads,
            fold_assignments=assignments,
            progress=run.progress,
        )
        for name, seconds in report.timings.items():
            logger.info(f"Timing: {name} took {seconds:.2f}s")
        out.write_text(report.to_json(run.params(), include_timings=run.include_timings), encoding="utf-8")
        logger.info(f"Wrote evaluation report to {out}")
        return 0

    def _k_from_report(self, scheme: str) -> int:
        """The k chosen most often for `scheme` in a previous report (smallest on ties)."""
        with open(self.run_config.report, "r", encoding="utf-8") as f:
            report = json.load(f)
        for entry in report.get("schemes", []):
            if entry.get("scheme") == scheme:
                ks = [fold["k"] for fold in entry.get("folds", [])]
                if ks:
                    values, counts = np.unique(ks, return_counts=True)
                    return int(values[np.argmax(counts)])
        raise EvaluationError(f"{self.run_config.report}: no folds for scheme '{scheme}'")

    def iicr_sweep(self) -> int:
        run = self.run_config
        out = self._require_out()
        scheme = run.schemes[0]
        k = run.k
        if run.report is not None:
            k = self._k_from_report(scheme)
            logger.info(f"Using k={k} from {run.report}")
        if k is None:
            k = config.K
        taus = run.taus or [run.tau]

        corpus = self.load_corpus()
        fit_indices = None
        notes = {"scheme": scheme, "k": k, "idf_scope": "all"}
        if scheme == "cptw-idf":
            split = make_split(corpus.labels, run.folds, run.seed, self._fold_assignments(corpus))
            fit_indices = split.pool_indices(0)
            notes["idf_scope"] = "fold-0-train"

        context = self._context(corpus, need_embeddings=True)
        sweep = tau_sweep(context, scheme, taus, k, fit_indices=fit_indices, normalize=run.normalize)
        sweep.notes.update(notes)
        write_sweep_csv(out, sweep, dict(run.params(), k=k))
        return 0

    def fig1_demo(self, stream: Optional[TextIO] = None) -> int:
        """
        Prints BOW and CPTW distances between the three demo sentences.

        Raises:
            DatasetError: If a sentence word has no embedding.
        """
        run = self.run_config
        stream = stream or sys.stdout
        tau = resolve_tau(run.tau)
        stopwords = load_stopwords(run.stopwords)
        docs = [(f"s{i + 1}", f"s{i + 1}", text) for i, text in enumerate(FIG1_SENTENCES)]
        corpus = build_corpus(docs, stopwords, run.min_token_len)
        emb = self.load_embeddings(corpus)

        missing = [w for w in corpus.vocabulary if w not in emb]
        if missing:
            raise DatasetError(f"demo words missing from the embeddings: {missing}")

        p = build_propagation(emb, corpus, tau)
        bow = l2_normalize_rows(tf_matrix(corpus))
        cptw = l2_normalize_rows(cptw_matrix(corpus, p))
        d_bow = pairwise_distances(bow, metric="euclidean")
        d_cptw = pairwise_distances(cptw, metric="euclidean")

        checks = {
            "d_CPTW(1,2) < d_BOW(1,2)": d_cptw[0, 1] < d_bow[0, 1],
            "d_CPTW(1,2) < min(d_CPTW(1,3), d_CPTW(2,3))": d_cptw[0, 1] < min(d_cptw[0, 2], d_cptw[1, 2]),
        }

        print(provenance_comment(dict(run.params(), tau=tau)), file=stream)
        print(f"# tau={fmt(tau)} stopwords={run.stopwords or 'SMART'} normalize=l2 metric=euclidean", file=stream)
        for i, text in enumerate(FIG1_SENTENCES):
            print(f"# {i + 1}: {text} -> {list(corpus.documents[i].tokens)}", file=stream)
        print("scheme\t" + "\t".join(f"d({a + 1},{b + 1})" for a, b in FIG1_PAIRS), file=stream)
        for name, dist in (("BOW", d_bow), ("CPTW", d_cptw)):
            print(name + "\t" + "\t".join(fmt(dist[a, b]) for a, b in FIG1_PAIRS), file=stream)
        for label, passed in checks.items():
            print(f"{'PASS' if passed else 'FAIL'}\t{label}", file=stream)
        return 0

    def run(self) -> int:
        """Validates inputs, then dispatches to the subcommand."""
        self.validate_paths()
        handlers = {
            "build-sim": self.build_sim,
            "represent": self.represent,
            "evaluate": self.evaluate,
            "iicr-sweep": self.iicr_sweep,
            "fig1-demo": self.fig1_demo,
        }
        logger.info(f"Running '{self.run_config.command}' with seed {self.run_config.seed}")
        return handlers[self.run_config.command]()
