"""Run manifests: the record that a CLI invocation completed, what it read,
and the content hashes of everything it wrote.  Written last, so the mere
presence of run_manifest.json signals a complete run."""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    tool_version: str
    subcommand: str
    config: dict
    derived_params: dict | None = None
    seed: int | None = None
    outputs: list = field(default_factory=list)
    started: float = field(default_factory=time.time)

    def add_output(self, path):
        self.outputs.append(str(path))

    def write(self, out_dir) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "tool_version": self.tool_version,
            "subcommand": self.subcommand,
            "config": self.config,
            "derived_params": self.derived_params,
            "seed": self.seed,
            "wall_time_s": time.time() - self.started,
            "outputs": [{"path": p, "sha256": sha256_file(p)} for p in self.outputs],
        }
        path = out_dir / "run_manifest.json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path
