"""Run directories, CSV/JSON writers and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path

MANIFEST_SCHEMA = "scswalk.run-manifest/1"
MANIFEST_NAME = "manifest.json"
OUT_ENV = "SCSWALK_OUT"


def default_out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, "runs"))


def fmt(x) -> str:
    """17 significant digits so every float survives a text round trip."""
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def new_run_dir(root: Path, subcommand: str) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S_%f")
    run_dir = root / f"{subcommand}-{stamp}"
    run_dir.mkdir()
    (root / "latest").write_text(run_dir.name + "\n", encoding="utf-8")
    return run_dir


def write_manifest(
    run_dir: Path,
    subcommand: str,
    parameters: dict,
    argv: list[str],
    seed: int | None,
    version: str,
    duration_s: float,
    outputs: list[Path],
    **extra,
) -> Path:
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "subcommand": subcommand,
        "parameters": parameters,
        "argv": list(argv),
        "seed": seed,
        "version": version,
        "duration_s": duration_s,
        "outputs": [{"file": Path(p).name, "sha256": sha256(p)} for p in sorted(outputs)],
        **extra,
    }
    return write_json(Path(run_dir) / MANIFEST_NAME, manifest)


def read_manifest(path: Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema") != MANIFEST_SCHEMA:
        raise ValueError(f"{path} is not a run manifest (schema {data.get('schema')!r})")
    return data
