"""Content-hash run manifests: staleness by hash, never by timestamp.

Each stage directory holds exactly one manifest recording what went in,
what came out, and the seed, so identical inputs are checkable by hash
equality alone. Timestamps live only here, never in stage outputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

MANIFEST_NAME = "manifest.json"
TOOL_VERSION = "0.1.0"


def file_hash(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def tree_hashes(directory: str | Path, skip_manifest: bool = True) -> dict[str, str]:
    """Relative path -> sha256 for every file under directory, sorted.

    Manifest files at any depth are provenance (they carry timestamps), not
    content, so they are excluded from content hashing by default.
    """
    directory = Path(directory)
    out = {}
    for path in sorted(directory.rglob("*")):
        if not path.is_file():
            continue
        rel = path.relative_to(directory).as_posix()
        if skip_manifest and path.name == MANIFEST_NAME:
            continue
        out[rel] = file_hash(path)
    return out


@dataclass
class RunManifest:
    stage: str
    input_hashes: dict[str, str] = field(default_factory=dict)
    output_hashes: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    started_at: str = ""
    finished_at: str = ""
    tool_version: str = TOOL_VERSION

    @staticmethod
    def now() -> str:
        return datetime.now(timezone.utc).isoformat()

    def save(self, stage_dir: str | Path) -> Path:
        path = Path(stage_dir) / MANIFEST_NAME
        doc = {
            "stage": self.stage,
            "input_hashes": dict(sorted(self.input_hashes.items())),
            "output_hashes": dict(sorted(self.output_hashes.items())),
            "seed": self.seed,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "tool_version": self.tool_version,
        }
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return path

    @classmethod
    def load(cls, stage_dir: str | Path) -> "RunManifest":
        doc = json.loads((Path(stage_dir) / MANIFEST_NAME).read_text())
        return cls(
            stage=doc["stage"],
            input_hashes=doc["input_hashes"],
            output_hashes=doc["output_hashes"],
            seed=doc["seed"],
            started_at=doc["started_at"],
            finished_at=doc["finished_at"],
            tool_version=doc["tool_version"],
        )
