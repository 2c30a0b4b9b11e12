"""Experiment manifests and reproducible file output.

Every CSV or JSON artifact is stamped with (or embeds) the content hash of
an :class:`ExperimentManifest` describing exactly the parameters that affect
the numbers: command, dimensions, seeds, distribution, solver settings, the
library version, and the RNG scheme.  Parameters that cannot change the
numbers (thread counts, output paths, plotting switches) stay out of the
manifest so reruns hash identically.

File conventions: JSON is written sorted with two-space indent; CSV uses '.'
as the decimal separator, LF line endings, and shortest round-trip float
formatting, independent of locale.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .rng import RNG_NAME, RNG_SCHEME_VERSION

MANIFEST_FORMAT_VERSION = 1


def _jsonable(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class ExperimentManifest:
    command: str
    params: dict = field(default_factory=dict)
    format_version: int = MANIFEST_FORMAT_VERSION
    library_version: str = __version__
    rng_name: str = RNG_NAME
    rng_version: int = RNG_SCHEME_VERSION

    def _core_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "command": self.command,
            "params": _jsonable(self.params),
            "library_version": self.library_version,
            "rng_name": self.rng_name,
            "rng_version": self.rng_version,
        }

    @property
    def content_hash(self) -> str:
        canonical = json.dumps(self._core_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        record = self._core_dict()
        record["content_hash"] = self.content_hash
        return record

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentManifest":
        manifest = cls(
            command=data["command"],
            params=data["params"],
            format_version=data["format_version"],
            library_version=data["library_version"],
            rng_name=data["rng_name"],
            rng_version=data["rng_version"],
        )
        stored = data.get("content_hash")
        if stored is not None and stored != manifest.content_hash:
            raise ValueError("manifest content hash does not match its parameters")
        return manifest


def format_cell(value) -> str:
    """Locale-independent scalar formatting for CSV cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, fieldnames, rows, manifest: ExperimentManifest) -> None:
    """Write dict rows with a trailing manifest_hash column, LF endings."""
    names = list(fieldnames) + ["manifest_hash"]
    digest = manifest.content_hash
    lines = [",".join(names)]
    for row in rows:
        cells = [format_cell(row[name]) for name in fieldnames]
        cells.append(digest)
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_json(path, manifest: ExperimentManifest, payload: dict) -> None:
    """Write {"manifest": ..., **payload} deterministically."""
    document = {"manifest": manifest.to_dict()}
    document.update(_jsonable(payload))
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        json.dump(document, handle, sort_keys=True, indent=2)
        handle.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="ascii") as handle:
        return json.load(handle)


def parse_config(path) -> dict:
    """Plain ``key = value`` defaults file; '#' starts a comment."""
    settings: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            settings[key.strip()] = value.strip()
    return settings
