"""JSON documents for operators, POVMs, ensembles and dual frames.

A matrix is a row-major list of rows whose entries are ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError
from .frames import KINDS, DualFrame


def matrix_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(m, dim: int) -> np.ndarray:
    try:
        a = np.array(m, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix entries must be [re, im] pairs: {exc}") from None
    if a.shape != (dim, dim, 2):
        raise FormatError(f"expected a {dim}x{dim} matrix of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def load_document(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FormatError(f"no such file: {path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top level must be an object")
    return doc


def _dim(doc: dict, path) -> int:
    d = doc.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError(f"{path}: 'dim' must be a positive integer")
    return d


def _list(doc: dict, key: str, path) -> list:
    v = doc.get(key)
    if not isinstance(v, list) or not v:
        raise FormatError(f"{path}: '{key}' must be a nonempty list")
    return v


def read_operator(path) -> np.ndarray:
    doc = load_document(path)
    if "matrix" not in doc:
        raise FormatError(f"{path}: missing 'matrix'")
    return matrix_from_json(doc["matrix"], _dim(doc, path))


def read_povm(path) -> list[np.ndarray]:
    """Raw POVM elements; validation is left to the caller."""
    doc = load_document(path)
    d = _dim(doc, path)
    return [matrix_from_json(m, d) for m in _list(doc, "elements", path)]


def read_ensemble(path) -> tuple[list[np.ndarray], list[float]]:
    doc = load_document(path)
    d = _dim(doc, path)
    states, weights = [], []
    for entry in _list(doc, "states", path):
        if not isinstance(entry, dict) or "rho" not in entry or "weight" not in entry:
            raise FormatError(f"{path}: each state needs 'weight' and 'rho'")
        w = entry["weight"]
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise FormatError(f"{path}: weight must be a number")
        weights.append(float(w))
        states.append(matrix_from_json(entry["rho"], d))
    return states, weights


def read_dual(path) -> DualFrame:
    doc = load_document(path)
    d = _dim(doc, path)
    kind = doc.get("kind", "alternate")
    if kind not in KINDS:
        raise FormatError(f"{path}: unknown dual kind {kind!r}")
    ops = np.stack([matrix_from_json(m, d) for m in _list(doc, "elements", path)])
    ops.setflags(write=False)
    return DualFrame(ops, kind)


def operator_document(a) -> dict:
    a = np.asarray(a)
    return {"dim": a.shape[0], "matrix": matrix_to_json(a)}


def povm_document(elements) -> dict:
    elements = np.asarray(elements)
    return {"dim": elements.shape[1], "elements": [matrix_to_json(e) for e in elements]}


def ensemble_document(states, weights) -> dict:
    states = np.asarray(states)
    return {
        "dim": states.shape[1],
        "states": [{"weight": float(w), "rho": matrix_to_json(s)} for s, w in zip(states, weights)],
    }


def dual_document(dual: DualFrame) -> dict:
    return {"dim": dual.dim, "kind": dual.kind, "elements": [matrix_to_json(e) for e in dual.elements]}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
