"""Dataset CSV and result JSON formats.

Datasets are CSV files with header ``sample_id,t,x1,...,xd`` and rows sorted
by ``(sample_id, t)``.  Floats are written with 17 significant digits so a
write/read round trip is lossless.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .signature import PathSample

SCHEMA_VERSION = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_dataset(path, samples) -> None:
    samples = list(samples)
    if not samples:
        raise ValueError("refusing to write an empty dataset")
    d = samples[0].dim
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_id", "t"] + [f"x{k + 1}" for k in range(d)])
            for sid, s in enumerate(samples):
                if s.dim != d:
                    raise ValueError(f"sample {sid} has dimension {s.dim}, expected {d}")
                for t, row in zip(s.times, s.points):
                    writer.writerow([sid, _fmt(t)] + [_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write dataset to {path}: {exc.strerror}") from exc


def read_dataset(path) -> list:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[:2] != ["sample_id", "t"] or len(header) < 3:
                raise ValueError(f"{path}: expected header sample_id,t,x1,...")
            rows = [r for r in reader if r]
    except OSError as exc:
        raise OSError(f"cannot read dataset from {path}: {exc.strerror}") from exc
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    ids = data[:, 0].astype(np.int64)
    samples = []
    for sid in np.unique(ids):
        block = data[ids == sid]
        block = block[np.argsort(block[:, 1], kind="stable")]
        samples.append(PathSample(block[:, 1], block[:, 2:]))
    return samples


def result_payload(result, config: dict) -> dict:
    """JSON-ready dict for a :class:`~sigtest.mmd.TestResult`."""
    return {
        "schema_version": SCHEMA_VERSION,
        "config_echo": config,
        "t_obs": result.t_obs,
        "c_alpha": result.c_alpha,
        "reject_threshold": result.reject_threshold,
        "p_value": result.p_value,
        "reject_permutation": result.reject_permutation,
        "perm_values": [float(v) for v in result.perm_values],
        "wall_time_ms": result.extra.get("wall_time_ms"),
        "seed": result.seed,
    }


def write_json(path, payload: dict) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror}") from exc
