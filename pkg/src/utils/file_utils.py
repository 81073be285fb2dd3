# src/utils/file_utils.py

"""
Utility functions for locating dataset files on disk.

Directory-per-class datasets are walked recursively; the result is sorted so
that corpus construction is byte-for-byte reproducible regardless of the
order the operating system lists directory entries in.
"""

import logging
from pathlib import Path
from typing import List, Optional, Set

logger = logging.getLogger(__name__)

# Extensions considered to be binary artefacts rather than documents
SKIPPED_EXTENSIONS = {".bin", ".npz", ".pkl", ".cptw"}


def find_class_dirs(root: Path) -> List[Path]:
    """
    Returns the immediate sub-directories of a dataset root, one per class.

    Hidden directories (starting with '.') are ignored.

    Args:
        root: The dataset root directory.

    Returns:
        Class directories sorted lexicographically by name.
    """
    return sorted(
        (d for d in root.iterdir() if d.is_dir() and not d.name.startswith(".")),
        key=lambda d: d.name,
    )


def find_document_files(directory: Path, extensions: Optional[Set[str]] = None) -> List[Path]:
    """
    Recursively finds all document files below a class directory.

    Args:
        directory: The directory to search.
        extensions: If given, only files with these (lower-case) suffixes are
                    returned. Otherwise every regular non-hidden file that is
                    not a known binary artefact is returned.

    Returns:
        A list of file paths sorted by their path relative to `directory`.
    """
    found: List[Path] = []
    for path in directory.rglob("*"):
        if not path.is_file():
            continue
        relative = path.relative_to(directory)
        if any(part.startswith(".") for part in relative.parts):
            continue
        suffix = path.suffix.lower()
        if extensions is not None:
            if suffix not in extensions:
                continue
        elif suffix in SKIPPED_EXTENSIONS:
            logger.debug(f"Skipping binary artefact {path}")
            continue
        found.append(path)

    return sorted(found, key=lambda p: p.relative_to(directory).as_posix())
