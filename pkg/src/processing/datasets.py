# src/processing/datasets.py

"""
Reads labelled datasets from disk.

Two layouts are accepted:

- a directory per class, `root/<label>/<file>`, one document per file;
- a delimited text file with one `label<TAB>text` record per line.

Records come back in a deterministic order (relative path, then line number)
so that rebuilding a corpus from the same input is byte-identical.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

from src.exceptions import DatasetError
from src.processing.corpus import RawDocument
from src.utils.file_utils import find_class_dirs, find_document_files

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

LABEL_SEPARATOR = "\t"


def _load_directory(root: Path) -> List[RawDocument]:
    stray = [p.name for p in root.iterdir() if p.is_file() and not p.name.startswith(".")]
    if stray:
        logger.warning(f"{root}: ignoring {len(stray)} file(s) outside class directories")

    entries = []
    for class_dir in find_class_dirs(root):
        for path in find_document_files(class_dir):
            entries.append((path.relative_to(root).as_posix(), class_dir.name, path))
    entries.sort(key=lambda entry: entry[0])

    records: List[RawDocument] = []
    for doc_id, label, path in entries:
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as e:
            raise DatasetError(f"{path}: unreadable ({e})") from e
        records.append((doc_id, label, text))
    return records


def _load_delimited(path: Path) -> List[RawDocument]:
    records: List[RawDocument] = []
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.rstrip("\r\n")
                if not line.strip():
                    continue
                if LABEL_SEPARATOR not in line:
                    raise DatasetError(f"{path}: line {line_no}: missing label separator")
                label, text = line.split(LABEL_SEPARATOR, 1)
                label = label.strip()
                if not label:
                    raise DatasetError(f"{path}: line {line_no}: empty label")
                records.append((f"line-{line_no}", label, text))
    except OSError as e:
        raise DatasetError(f"{path}: unreadable ({e})") from e
    return records


def load_dataset(path: PathLike) -> List[RawDocument]:
    """
    Loads a labelled dataset.

    Args:
        path: A class-per-directory root or a `label<TAB>text` file.

    Returns:
        A list of (id, label, raw text) records. Directory ids are the posix
        path relative to the root; file ids are `line-<n>`.

    Raises:
        FileNotFoundError: If the path does not exist.
        DatasetError: On an empty dataset, an unreadable file or a malformed line.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found at '{path}'")

    records = _load_directory(path) if path.is_dir() else _load_delimited(path)
    if not records:
        raise DatasetError(f"{path}: dataset is empty")

    labels = sorted({label for _, label, _ in records})
    logger.info(f"Loaded {len(records)} documents in {len(labels)} classes from {path}")
    return records


def load_split_file(path: PathLike, doc_ids: Sequence[str]) -> Dict[str, int]:
    """
    Reads fixed fold assignments, one `doc_id<TAB>fold` record per line.

    Args:
        path: The split file.
        doc_ids: Every document id of the corpus; each must be assigned.

    Returns:
        Mapping from document id to fold index (0-based, contiguous).

    Raises:
        DatasetError: On malformed lines, unknown or missing ids, or
                      non-contiguous fold numbers.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Split file not found at '{path}'")

    known = set(doc_ids)
    folds: Dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split(LABEL_SEPARATOR)
            if len(parts) != 2:
                raise DatasetError(f"{path}: line {line_no}: expected 'doc_id<TAB>fold'")
            doc_id, fold = parts[0], parts[1].strip()
            if doc_id not in known:
                raise DatasetError(f"{path}: line {line_no}: unknown document id '{doc_id}'")
            if doc_id in folds:
                raise DatasetError(f"{path}: line {line_no}: document '{doc_id}' assigned twice")
            try:
                folds[doc_id] = int(fold)
            except ValueError:
                raise DatasetError(f"{path}: line {line_no}: fold '{fold}' is not an integer") from None

    missing = [d for d in doc_ids if d not in folds]
    if missing:
        raise DatasetError(f"{path}: {len(missing)} document(s) have no fold, e.g. '{missing[0]}'")
    used = sorted(set(folds.values()))
    if used != list(range(len(used))):
        raise DatasetError(f"{path}: folds must be numbered 0..F-1, found {used}")
    return folds
