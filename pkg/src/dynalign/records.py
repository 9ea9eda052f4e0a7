"""Experiment records and tabular output helpers."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def file_digest(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


@dataclass
class ExperimentRecord:
    subcommand: str
    config: dict
    inputs: dict                      # path -> digest
    seed: int | None = None
    argv: list = field(default_factory=list)
    tool_version: str = __version__
    wall_time: float = 0.0
    outputs: dict = field(default_factory=dict)
    environment: dict = field(default_factory=lambda: {
        "python": sys.version.split()[0], "platform": platform.platform(),
    })

    @classmethod
    def start(cls, subcommand, config, input_paths: Iterable[str], seed=None, argv=None):
        rec = cls(subcommand, config, {str(p): file_digest(p) for p in input_paths}, seed,
                  list(argv if argv is not None else sys.argv[1:]))
        rec._t0 = time.perf_counter()
        return rec

    def finish(self, out_dir: str | os.PathLike, **outputs) -> Path:
        self.wall_time = time.perf_counter() - getattr(self, "_t0", time.perf_counter())
        self.outputs.update(outputs)
        path = Path(out_dir) / "record.json"
        payload = {k: v for k, v in asdict(self).items()}
        path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
        return path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "item"):
        return x.item()
    return x


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_csv(path, rows: Sequence[dict], columns: Sequence[str] | None = None) -> None:
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in columns})


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v
