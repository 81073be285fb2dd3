# src/main.py

"""
The main entry point for the cptw toolkit.

Parses the command line, configures logging, resolves every setting against
the user configuration and hands the run to CptwApp. Run it as

    python -m src.main <subcommand> [options]

Exit codes: 0 on success, 1 on a usage error, 2 on a data, format or
parameter error.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

# Allow running this file directly as well as with `python -m src.main`
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src import TOOL_NAME, __version__
from src.app import CptwApp, RunConfig
from src.config import ConfigManager, inclusive_range, config as default_config
from src.embeddings.loader import EMBEDDING_FORMATS
from src.evaluation.distances import METRICS
from src.exceptions import CptwError
from src.weighting.schemes import NORMALIZATIONS, SCHEMES, parse_schemes
from src.weighting.term_weights import IDF_MODES
from src.weighting.vector_io import VECTOR_FORMATS

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(text: str) -> List[float]:
    """
    Parses a value list: "a,b,c" or an inclusive range "start:stop:step".
    """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            return inclusive_range(start, stop, step)
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid value list '{text}'") from None


def parse_ints(text: str) -> List[int]:
    values = parse_values(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected integers, got '{text}'")
    return [int(v) for v in values]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    p.add_argument("--config", type=Path, help="JSON config file overriding the defaults")
    p.add_argument("--stopwords", type=Path, help="stopword file, one token per line")
    p.add_argument("--min-token-len", type=int)
    p.add_argument("--threads", type=int, help="worker threads; results do not depend on it")
    p.add_argument("--seed", type=int)


def _add_dataset(p: argparse.ArgumentParser, embeddings_required: bool = True) -> None:
    p.add_argument("--dataset", type=Path, required=True, help="class-per-directory root or label<TAB>text file")
    p.add_argument("--embeddings", type=Path, required=embeddings_required)
    p.add_argument("--embedding-format", choices=EMBEDDING_FORMATS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL_NAME, description="Contextually propagated term weights toolkit.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("build-sim", help="build and save the propagation matrix for one tau")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--tau", type=float)
    p.add_argument("--block-size", type=int)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("represent", help="write document vectors for one scheme")
    _add_common(p)
    _add_dataset(p, embeddings_required=False)
    p.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    p.add_argument("--tau", type=float)
    p.add_argument("--matrix", type=Path, help="precomputed propagation matrix")
    p.add_argument("--k1", type=float, default=1.2)
    p.add_argument("--b", type=float, default=0.75)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--idf-mode", choices=IDF_MODES)
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    p.add_argument("--format", dest="vector_format", choices=VECTOR_FORMATS, default="binary")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("evaluate", help="cross-validated kNN evaluation")
    _add_common(p)
    _add_dataset(p, embeddings_required=False)
    p.add_argument("--schemes", type=parse_schemes, required=True, help="comma-separated scheme names")
    p.add_argument("--folds", type=int)
    p.add_argument("--split-file", type=Path, help="fixed folds, doc_id<TAB>fold per line")
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    p.add_argument("--metric", choices=METRICS)
    p.add_argument("--idf-mode", choices=IDF_MODES)
    p.add_argument("--grid-k", type=parse_ints)
    p.add_argument("--grid-tau", type=parse_values)
    p.add_argument("--grid-k1", type=parse_values)
    p.add_argument("--grid-b", type=parse_values)
    p.add_argument("--grid-alpha", type=parse_values)
    p.add_argument("--include-timings", action="store_true")
    p.add_argument("--no-progress", action="store_true")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("iicr-sweep", help="IICR as a function of tau, written as CSV")
    _add_common(p)
    _add_dataset(p)
    p.add_argument("--scheme", default="cptw-idf", choices=["cptw", "cptw-idf"])
    p.add_argument("--taus", type=parse_values, default=None, help="e.g. 0.05:1.0:0.05")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int)
    group.add_argument("--report", type=Path, help="evaluation report to take k from")
    p.add_argument("--folds", type=int)
    p.add_argument("--split-file", type=Path)
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    p.add_argument("--idf-mode", choices=IDF_MODES)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("fig1-demo", help="BOW vs CPTW distances of three example sentences")
    _add_common(p)
    p.add_argument("--embeddings", type=Path, required=True)
    p.add_argument("--embedding-format", choices=EMBEDDING_FORMATS)
    p.add_argument("--tau", type=float)

    return parser


def _pick(args: argparse.Namespace, name: str, fallback):
    value = getattr(args, name, None)
    return fallback if value is None else value


def resolve_run(args: argparse.Namespace, cfg: ConfigManager) -> RunConfig:
    """Merges parsed arguments over the configuration defaults."""
    grids = cfg.GRIDS
    for name in grids:
        override = getattr(args, f"grid_{name}", None)
        if override is not None:
            grids[name] = override

    command = args.command
    default_tau = cfg.FIG1_TAU if command == "fig1-demo" else cfg.TAU
    schemes = getattr(args, "schemes", None) or ([args.scheme] if getattr(args, "scheme", None) else [])
    return RunConfig(
        command=command,
        dataset=getattr(args, "dataset", None),
        embeddings=getattr(args, "embeddings", None),
        embedding_format=getattr(args, "embedding_format", None),
        schemes=schemes,
        tau=_pick(args, "tau", default_tau),
        taus=_pick(args, "taus", grids["tau"] if command == "iicr-sweep" else []),
        k=getattr(args, "k", None),
        k1=_pick(args, "k1", 1.2),
        b=_pick(args, "b", 0.75),
        alpha=_pick(args, "alpha", 1e-3),
        seed=_pick(args, "seed", cfg.SEED),
        folds=_pick(args, "folds", cfg.FOLDS),
        validation_draws=cfg.VALIDATION_DRAWS,
        validation_fraction=cfg.VALIDATION_FRACTION,
        normalize=_pick(args, "normalize", cfg.NORMALIZE),
        metric=_pick(args, "metric", cfg.METRIC),
        idf_mode=_pick(args, "idf_mode", cfg.IDF_MODE),
        grids=grids,
        stopwords=cfg.stopwords_path(getattr(args, "stopwords", None)),
        min_token_len=_pick(args, "min_token_len", cfg.MIN_TOKEN_LEN),
        block_size=_pick(args, "block_size", cfg.BLOCK_SIZE),
        split_file=getattr(args, "split_file", None),
        matrix=getattr(args, "matrix", None),
        report=getattr(args, "report", None),
        vector_format=_pick(args, "vector_format", "binary"),
        out=getattr(args, "out", None),
        threads=_pick(args, "threads", cfg.THREADS),
        include_timings=bool(getattr(args, "include_timings", False)),
        log_level=args.log_level,
        progress=not getattr(args, "no_progress", False) and args.log_level in ("DEBUG", "INFO"),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs the toolkit and returns the process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr, force=True)

    try:
        if args.config is not None and not args.config.exists():
            raise FileNotFoundError(f"config file not found: '{args.config}'")
        cfg = ConfigManager(args.config) if args.config is not None else default_config
        if args.threads is not None and args.threads < 1:
            parser.error("--threads must be at least 1")
        run = resolve_run(args, cfg)
        return CptwApp(run).run()
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except (CptwError, OSError) as e:
        print(f"{TOOL_NAME}: error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        return EXIT_DATA


if __name__ == '__main__':
    sys.exit(main())
