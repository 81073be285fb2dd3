# src/utils/provenance.py

"""
Provenance helpers shared by every output writer.

Each output file carries the tool version, the seed and a digest of the fully
resolved parameters so results from different files can be joined and audited.
"""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping

from src import TOOL_NAME, __version__


def _canonical(value: Any) -> Any:
    """Makes parameters JSON-serializable with a stable representation."""
    if isinstance(value, Mapping):
        return {str(k): _canonical(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, float):
        return repr(value)
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def config_digest(params: Mapping[str, Any]) -> str:
    """SHA-256 hex digest of the canonical JSON form of `params`."""
    payload = json.dumps(_canonical(params), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def vocabulary_hash(words: Iterable[str]) -> bytes:
    """32-byte SHA-256 digest of the newline-joined vocabulary, order sensitive."""
    digest = hashlib.sha256()
    for i, word in enumerate(words):
        if i:
            digest.update(b"\n")
        digest.update(word.encode("utf-8"))
    return digest.digest()


def provenance(params: Mapping[str, Any]) -> dict[str, Any]:
    """The provenance block embedded in reports, CSV headers and sidecars."""
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "seed": params.get("seed"),
        "config_digest": config_digest(params),
    }


def provenance_comment(params: Mapping[str, Any]) -> str:
    """Provenance as a single CSV comment line (no trailing newline)."""
    info = provenance(params)
    return " ".join(["#"] + [f"{k}={info[k]}" for k in ("tool", "version", "seed", "config_digest")])


def fmt(value: float) -> str:
    """Formats a number with 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def round_sig(value: float) -> float:
    """Rounds to 6 significant digits for JSON output."""
    if value is None or not math.isfinite(value):
        return value
    return float(f"{value:.6g}")


def write_sidecar(path: Path, params: Mapping[str, Any], **extra: Any) -> Path:
    """
    Writes `<path>.json` next to a fixed-layout binary output.

    Returns:
        The sidecar path.
    """
    sidecar = Path(f"{path}.json")
    document = {"provenance": provenance(params), **extra, "parameters": _canonical(params)}
    with open(sidecar, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    return sidecar
