"""CSV / JSON artifact writers.

Every CSV starts with a ``# experiment: <hash>`` comment line followed by
the header row.  Floats are written with ``repr`` so reruns are byte-identical.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def experiment_hash(obj) -> str:
    text = json.dumps(obj, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], exp_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# experiment: {exp_hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_dict_rows(path, rows: list[dict], exp_hash: str) -> Path:
    header = []
    for row in rows:
        header.extend(key for key in row if key not in header)
    return write_csv(path, header, ([row.get(key) for key in header] for row in rows), exp_hash)


def read_csv(path) -> tuple[str, list[str], list[list[str]]]:
    """Return (experiment hash, header, rows)."""
    with Path(path).open() as fh:
        first = fh.readline().strip()
        rows = list(csv.reader(fh))
    return first.split(":", 1)[1].strip(), rows[0], rows[1:]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def histogram_rows(hist, alpha=None):
    """Rows of (bin_center, empirical_density, analytic_density)."""
    from .analytics import density

    centers = hist.centers
    analytic = density(alpha, centers) if alpha is not None else [None] * centers.size
    return zip(centers, hist.densities, analytic)


HISTOGRAM_HEADER = ("bin_center", "empirical_density", "analytic_density")
