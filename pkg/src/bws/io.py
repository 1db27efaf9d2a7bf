"""Matrix JSON files, CSV output and run reports."""
import csv
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .metric import GaussParam
from .symmat import MAX_DIM, SPD_ABS_FLOOR, SPD_REL_FLOOR, as_spd


class ParseError(ValueError):
    """Input file is not a valid matrix document."""


def _matrix_from_doc(doc, where):
    if not isinstance(doc, dict) or "rows" not in doc:
        raise ParseError(f"{where}: expected an object with 'rows'")
    rows = doc["rows"]
    try:
        M = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: rows are not a numeric matrix ({exc})") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ParseError(f"{where}: rows must form a non-empty square matrix, got shape {M.shape}")
    n = M.shape[0]
    if "dim" in doc and doc["dim"] != n:
        raise ParseError(f"{where}: dim = {doc['dim']!r} but rows are {n}x{n}")
    if n > MAX_DIM:
        raise ParseError(f"{where}: {n}x{n} exceeds the {MAX_DIM}x{MAX_DIM} limit")
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{where}: non-finite entries")
    if np.max(np.abs(M - M.T)) > 1e-12 * max(1.0, np.max(np.abs(M))):
        raise ParseError(f"{where}: matrix is not symmetric")
    return 0.5 * (M + M.T)


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from exc


def load_sym(path):
    """Symmetric matrix from ``{"dim": n, "rows": [...]}``."""
    doc = read_json(path)
    if isinstance(doc, dict) and "cov" in doc:
        raise ParseError(f"{path}: expected a single matrix, found a Gaussian")
    return _matrix_from_doc(doc, path)


def load_gauss(path, abs_floor=SPD_ABS_FLOOR, rel_floor=SPD_REL_FLOOR):
    """Gaussian from ``{"mean": [...], "cov": {...}}`` or a bare covariance
    matrix document (zero mean). Raises ``NotSpd`` if the covariance fails
    validation."""
    doc = read_json(path)
    if isinstance(doc, dict) and "cov" in doc:
        cov = _matrix_from_doc(doc["cov"], f"{path}:cov")
        try:
            mean = np.array(doc.get("mean", np.zeros(cov.shape[0])), dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: mean is not numeric") from exc
        if mean.shape[0] != cov.shape[0]:
            raise ParseError(f"{path}: mean has length {mean.shape[0]}, cov is {cov.shape[0]}x{cov.shape[0]}")
    else:
        cov = _matrix_from_doc(doc, path)
        mean = np.zeros(cov.shape[0])
    cov = as_spd(cov, abs_floor, rel_floor, name=f"{path}")
    return GaussParam(mean, cov)


def matrix_doc(M):
    M = np.asarray(M, dtype=float)
    return {"dim": int(M.shape[0]), "rows": M.tolist()}


def file_digest(path):
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


def fmt(x):
    """Shortest round-trip text for a float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def sigma_header(n, prefix="sigma"):
    return [f"{prefix}_{i + 1}{j + 1}" for i in range(n) for j in range(n)]


def write_csv(path, header, rows):
    """Write a comma-separated file with LF line endings; ``path=None`` writes
    to stdout."""
    if path is None:
        _write_rows(sys.stdout, header, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "argv", "inputs", "results", "tolerances", "wall_time_s", "version", "status"],
    "properties": {
        "command": {"type": "string"},
        "argv": {"type": "array", "items": {"type": "string"}},
        "inputs": {"type": "object", "additionalProperties": {"type": "string"}},
        "results": {"type": "object"},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
        "wall_time_s": {"type": "number", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "version": {"type": "string"},
        "status": {"type": "string", "enum": ["ok", "cone_exit", "error"]},
        "exit_code": {"type": "integer"},
    },
}


def run_report(command, argv, inputs, results, tolerances, wall_time, seed=None, status="ok", exit_code=0):
    rep = {
        "command": command,
        "argv": list(argv),
        "inputs": {p: file_digest(p) for p in inputs},
        "results": jsonable(results),
        "tolerances": jsonable(tolerances),
        "wall_time_s": float(wall_time),
        "version": __version__,
        "status": status,
        "exit_code": exit_code,
    }
    if seed is not None:
        rep["seed"] = int(seed)
    return rep
