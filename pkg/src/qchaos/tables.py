"""CSV and JSON emission helpers shared by the command line and scripts."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys, non-finite floats as null)."""
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def mode_table_csv(pairs) -> str:
    """``family, indices, lambda, multiplicity`` rows for a list of eigenpairs."""
    lams = np.array([p.eigenvalue for p in pairs], dtype=float)
    rows = []
    for p in pairs:
        mult = int(np.count_nonzero(np.abs(lams - p.eigenvalue) <= 1e-9 * max(1.0, p.eigenvalue)))
        idx = " ".join(str(i) for i in p.index)
        rows.append([p.family, idx, float(p.eigenvalue), mult])
    return csv_text(["family", "indices", "lambda", "multiplicity"], rows)


def write(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
