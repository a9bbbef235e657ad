# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Run Manifests

Every output directory gets a ``manifest.json`` naming the command, the
resolved config, the tool version, hashes of every input and every output
file written.
"""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

from wienerlab import __version__
from wienerlab.utils.config import ConfigDocument
from wienerlab.utils.logging import RunContext
from wienerlab.utils.metrics import metrics

MANIFEST_NAME = "manifest.json"


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    workers: int | None = None
    seed: int | None = None
    exit_code: int | None = None
    run_id: str = ""
    metrics: dict = field(default_factory=dict)
    python: str = field(default_factory=platform.python_version)

    @classmethod
    def start(cls, command: str, doc: ConfigDocument, workers: int | None = None,
              seed: int | None = None) -> RunManifest:
        manifest = cls(command, doc.snapshot(), workers=workers, seed=seed, run_id=RunContext.get_id())
        manifest.inputs[doc.source] = doc.digest
        return manifest

    def add_input(self, path: str | Path):
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path: str | Path) -> Path:
        path = Path(path)
        if path.name not in self.outputs:
            self.outputs.append(path.name)
        return path

    def write(self, out_dir: str | Path) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        self.metrics = metrics.snapshot()
        data = asdict(self)
        data["outputs"] = sorted(self.outputs)
        path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str), encoding="utf-8")
        return path


def load_manifest(path: str | Path) -> RunManifest:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunManifest(**data)
