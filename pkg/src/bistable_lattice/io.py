"""JSON and CSV serialisation shared by the CLI and test fixtures."""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from .lattice import Lattice, build_lattice


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    # repr-based float output round-trips exactly
    return json.dumps(_plain(obj), allow_nan=False)


def strain_to_dict(E):
    E = np.asarray(E, dtype=float)
    return {"a": float(E[0, 0]), "b": float(E[0, 1]), "c": float(E[1, 1])}


def strain_from_dict(d):
    return np.array([[d["a"], d["b"]], [d["b"], d["c"]]], dtype=float)


def lattice_from_dict(d) -> Lattice:
    """Rebuild a lattice from its JSON form, checking nodes and edges agree."""
    lat = build_lattice(int(d["n"]))
    if "nodes" in d and not np.allclose(np.asarray(d["nodes"]), lat.nodes, atol=1e-12):
        raise ValueError("node positions do not match the canonical lattice")
    if "edges" in d and not np.array_equal(np.asarray(d["edges"]), lat.edges):
        raise ValueError("edge list does not match the canonical lattice")
    return lat


def load_vector(path_or_obj, length=None):
    """Read a JSON array (or {"U": [...]}/{"kappa": [...]}) from a path or object."""
    if isinstance(path_or_obj, str):
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    else:
        obj = path_or_obj
    if isinstance(obj, dict):
        for key in ("U", "kappa", "values"):
            if key in obj:
                obj = obj[key]
                break
    v = np.asarray(obj, dtype=float).ravel()
    if length is not None and v.size != length:
        raise ValueError(f"expected a vector of length {length}, got {v.size}")
    return v


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def edge_rows(lattice: Lattice, kappa, extra=None):
    """Per-edge rows ``edge, i, j, direction, x_i, y_i, x_j, y_j, kappa[, extra...]``."""
    rows = []
    for e, (i, j, r) in enumerate(lattice.edges):
        xi, yi = lattice.nodes[i]
        xj, yj = lattice.nodes[j]
        row = [e, i, j, r, xi, yi, xj, yj, float(kappa[e])]
        if extra is not None:
            row += list(extra[e])
        rows.append(row)
    return rows


EDGE_HEADER = ["edge", "i", "j", "direction", "x_i", "y_i", "x_j", "y_j", "kappa"]
FLATBOTTOM_HEADER = ["x1", "x2", "x3", "a", "b", "c", "lambda1", "lambda2"]
REGION_HEADER = ["lambda1", "lambda2", "family", "mu", "k", "n1", "n2", "n3"]
