# scripts/build_similarity_matrices.py

"""
Standalone script to pre-compute propagation matrices for a grid of tau values.

This script performs the following steps:
1.  Loads a labelled dataset and builds its corpus with the configured
    stopword list.
2.  Loads the pretrained embeddings, keeping only rows the corpus vocabulary
    can use.
3.  Builds the similarity matrix once at the smallest tau of the grid and
    derives the matrix for every larger tau from it.
4.  Row-normalizes each one and saves it as `<out_dir>/sim_tau<tau>.cptw`,
    with a `.json` provenance sidecar.

Pre-computing the matrices lets `represent --matrix` and repeated runs skip
the quadratic similarity computation.

To run this script:
    python scripts/build_similarity_matrices.py --dataset D --embeddings E --out-dir matrices/
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from tqdm import tqdm

# --- Add project root to sys.path to allow for imports from src ---
# This allows the script to be run from any directory and still find the 'src' package.
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)
# --- End of path modification ---

try:
    from src.config import config
    from src.embeddings.loader import load_embeddings
    from src.exceptions import CptwError
    from src.main import LOG_FORMAT, parse_values
    from src.processing.corpus import build_corpus
    from src.processing.datasets import load_dataset
    from src.processing.text_processor import load_stopwords
    from src.propagation.matrix_io import save_matrix
    from src.propagation.similarity_graph import build_similarity, resolve_tau, row_normalize
    from src.utils.provenance import fmt
except ImportError as e:
    print(f"Error: Failed to import necessary modules from 'src'.\n"
          f"Please ensure the script is run from the project's root directory or that "
          f"the 'src' directory is in your PYTHONPATH.\nDetails: {e}")
    sys.exit(1)

logger = logging.getLogger("build_similarity_matrices")


def matrix_file_name(tau: float) -> str:
    """File name for the matrix of one tau, e.g. `sim_tau0.35.cptw`."""
    return f"sim_tau{fmt(tau)}.cptw"


def build_similarity_matrices(
    dataset: Path,
    embeddings: Path,
    out_dir: Path,
    taus,
    stopwords=None,
    block_size: int = 512,
    threads: int = 1,
) -> list:
    """
    Builds and saves one propagation matrix per tau.

    Returns:
        The written matrix paths in tau order.
    """
    taus = sorted(dict.fromkeys(resolve_tau(t) for t in taus))
    corpus = build_corpus(load_dataset(dataset), load_stopwords(stopwords), config.MIN_TOKEN_LEN)
    emb = load_embeddings(embeddings, restrict_to=set(corpus.vocabulary))

    base = build_similarity(emb, corpus, taus[0], block_size=block_size, threads=threads)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for tau in tqdm(taus, desc="matrices"):
        p = row_normalize(base.restrict(tau))
        params = {
            "command": "build-sim",
            "dataset": str(dataset),
            "embeddings": str(embeddings),
            "stopwords": str(stopwords),
            "min_token_len": config.MIN_TOKEN_LEN,
            "block_size": block_size,
            "seed": None,
        }
        written.append(save_matrix(p, out_dir / matrix_file_name(tau), params))
        logger.info(f"tau={fmt(tau)}: {p.nnz} entries")
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Pre-compute propagation matrices for a tau grid.")
    parser.add_argument("--dataset", type=Path, required=True)
    parser.add_argument("--embeddings", type=Path, required=True)
    parser.add_argument("--out-dir", type=Path, required=True)
    parser.add_argument("--taus", type=parse_values, default=None, help="e.g. 0.05:1.0:0.05")
    parser.add_argument("--stopwords", type=Path)
    parser.add_argument("--threads", type=int, default=config.THREADS)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    print("--- cptw: Propagation Matrix Builder ---")
    taus = args.taus or config.GRIDS["tau"]
    try:
        paths = build_similarity_matrices(
            args.dataset,
            args.embeddings,
            args.out_dir,
            taus,
            stopwords=config.stopwords_path(args.stopwords),
            block_size=config.BLOCK_SIZE,
            threads=args.threads,
        )
    except (CptwError, OSError) as e:
        print(f"\nError: {e}")
        return 2
    print(f"\nSaved {len(paths)} matrices to: {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
