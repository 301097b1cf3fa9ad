"""Plain-text readers and writers.

Matrices are headerless CSV with one row per line; core scores and traces
hold one number per line; edge lists are ``i j weight`` rows with 0-based
indices; records are JSON objects. Reals are written with 17 significant
digits, so a write/read cycle reproduces every float exactly.
"""
import json
from pathlib import Path

import numpy as np

from .errors import DataValidationError, ShapeMismatch

REAL = "%.17g"


def _read(path, **kw):
    try:
        return np.loadtxt(path, ndmin=2, **kw)
    except ValueError as exc:
        raise DataValidationError(f"{path}: {exc}") from exc


def write_matrix(path, M):
    M = np.asarray(M)
    fmt = "%d" if np.issubdtype(M.dtype, np.integer) else REAL
    np.savetxt(path, np.atleast_2d(M), fmt=fmt, delimiter=",", newline="\n", encoding="utf-8")


def read_matrix(path):
    M = _read(path, delimiter=",", dtype=float)
    if not np.all(np.isfinite(M)):
        raise DataValidationError(f"{path}: non-finite entries")
    return M


def read_square(path):
    M = read_matrix(path)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{path}: expected a square matrix, got {M.shape}")
    return M


def write_vector(path, v):
    v = np.asarray(v)
    fmt = "%d" if np.issubdtype(v.dtype, np.integer) else REAL
    np.savetxt(path, np.ravel(v), fmt=fmt, newline="\n", encoding="utf-8")


def read_vector(path, dtype=float):
    return np.ravel(np.loadtxt(path, dtype=dtype, ndmin=1))


def write_edges(path, theta):
    """Upper-triangle nonzeros of a symmetric matrix as ``i j weight`` rows."""
    theta = np.asarray(theta, dtype=float)
    i, j = np.nonzero(np.triu(theta, k=1))
    rows = np.column_stack([i, j, theta[i, j]]) if i.size else np.zeros((0, 3))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b, w in rows:
            fh.write(f"{int(a)} {int(b)} {REAL % w}\n")


def read_edges(path, n=None):
    """Symmetric matrix from an edge list; ``n`` defaults to the largest index + 1."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 3:
                raise DataValidationError(f"{path}:{lineno}: expected 'i j weight'")
            try:
                rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise DataValidationError(f"{path}:{lineno}: {exc}") from exc
    top = max((max(a, b) for a, b, _ in rows), default=-1) + 1
    n = top if n is None else int(n)
    if top > n or any(a < 0 or b < 0 for a, b, _ in rows):
        raise DataValidationError(f"{path}: node index outside [0, {n})")
    theta = np.zeros((n, n))
    for a, b, w in rows:
        theta[a, b] = theta[b, a] = w
    return theta


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def read_json(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise DataValidationError(f"{path}: expected a JSON object")
    return obj
