"""Deterministic CSV/JSON emission.

Every file carries a header block (tool version, config echo, grid
signature) and no timestamps, so identical (config, seed) pairs produce
byte-identical output on one platform.  CSV data uses 9 significant
digits; JSON floats use Python's shortest round-trip representation
(reparses to the exact double).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["meta_block", "write_csv", "write_json"]

CSV_SIG = 9


def meta_block(config_echo: dict, grid_signature: str | None = None,
               seed: int | None = None) -> dict:
    meta = {"tool": f"anwaves {__version__}", "config": dict(config_echo)}
    if grid_signature is not None:
        meta["grid"] = grid_signature
    if seed is not None:
        meta["seed"] = seed
    return meta


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.{CSV_SIG}g}"
    return str(x)


def write_csv(path: str | Path, columns: dict, meta: dict) -> Path:
    """Write named columns with a '#'-prefixed metadata block and one header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[k])) for k in names]
    n_rows = len(arrays[0])
    if any(len(a) != n_rows for a in arrays):
        raise ValueError("CSV columns must have equal length")
    lines = [f"# {k} = {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: str | Path, payload: dict, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"meta": _jsonable(meta)}
    doc.update(_jsonable(payload))
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path
