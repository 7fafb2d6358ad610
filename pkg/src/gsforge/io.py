"""CSV, legacy-VTK and JSON export.

CSV: one header line naming the columns, then one row per grid node with
floats written by ``repr`` (17 significant digits, exact round trip).
VTK: legacy ASCII STRUCTURED_GRID with POINT_DATA scalars and vectors;
node order has the first grid index varying fastest.
JSON: sorted keys, floats via ``repr``, so equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

VTK_HEADER = "# vtk DataFile Version 3.0"
FORMATS = ("csv", "vtk", "json")


def _check_arrays(arrays: dict, shape=None):
    if not arrays:
        raise ValueError("empty field: nothing to export")
    for name, a in arrays.items():
        a = np.asarray(a)
        if a.size == 0:
            raise ValueError(f"empty field {name!r}")
        if shape is not None and a.shape[: len(shape)] != tuple(shape):
            raise ValueError(f"array {name!r} has shape {a.shape}, expected {tuple(shape)}")


def write_csv(path, columns: dict) -> None:
    """Columns of equal length; header = column names."""
    _check_arrays(columns)
    cols = {k: np.asarray(v, dtype=float).ravel() for k, v in columns.items()}
    n = {len(v) for v in cols.values()}
    if len(n) != 1:
        raise ValueError("CSV columns must have equal length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(cols))
        for row in zip(*cols.values()):
            w.writerow([repr(float(v)) for v in row])


def write_csv_grid(path, coords: tuple, names: tuple, arrays: dict) -> None:
    """Grid arrays of shape (n1, n2) with 1D coordinate vectors ``coords``."""
    c1, c2 = (np.asarray(c, dtype=float) for c in coords)
    _check_arrays(arrays, (len(c1), len(c2)))
    A, B = np.meshgrid(c1, c2, indexing="ij")
    cols = {names[0]: A, names[1]: B}
    cols.update(arrays)
    write_csv(path, cols)


def read_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_vtk(path, points, scalars: dict | None = None, vectors: dict | None = None,
              title: str = "gsforge field") -> None:
    """``points`` has shape (n1, n2, 3); data arrays have shape (n1, n2) or (n1, n2, 3)."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 3 or P.shape[2] != 3 or P.size == 0:
        raise ValueError("points must have shape (n1, n2, 3)")
    n1, n2 = P.shape[:2]
    scalars, vectors = scalars or {}, vectors or {}
    _check_arrays({**scalars, **vectors}, (n1, n2))
    N = n1 * n2

    def order(a):  # first index fastest
        a = np.asarray(a, dtype=float)
        return a.transpose((1, 0) + tuple(range(2, a.ndim))).reshape(N, -1)

    lines = [VTK_HEADER, title.replace("\n", " ")[:255], "ASCII", "DATASET STRUCTURED_GRID",
             f"DIMENSIONS {n1} {n2} 1", f"POINTS {N} double"]
    lines += [" ".join(repr(float(v)) for v in row) for row in order(P)]
    lines.append(f"POINT_DATA {N}")
    for name, a in scalars.items():
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [repr(float(v)) for v in order(a)[:, 0]]
    for name, a in vectors.items():
        lines.append(f"VECTORS {name} double")
        lines += [" ".join(repr(float(v)) for v in row) for row in order(a)]
    Path(path).write_text("\n".join(lines) + "\n")


def check_vtk(path) -> dict:
    """Minimal conformance check; returns dimensions and array names."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != VTK_HEADER:
        raise ValueError("missing legacy VTK header")
    if lines[2] != "ASCII" or lines[3] != "DATASET STRUCTURED_GRID":
        raise ValueError("not an ASCII structured grid")
    dims = tuple(int(v) for v in lines[4].split()[1:])
    N = int(np.prod(dims))
    if lines[5].split()[:2] != ["POINTS", str(N)]:
        raise ValueError("POINTS count does not match DIMENSIONS")
    i = 6 + N
    if lines[i] != f"POINT_DATA {N}":
        raise ValueError("POINT_DATA block missing or mis-sized")
    i += 1
    names = []
    while i < len(lines):
        head = lines[i].split()
        if head[0] == "SCALARS":
            names.append(head[1])
            i += 2 + N
        elif head[0] == "VECTORS":
            names.append(head[1])
            i += 1 + N
        else:
            raise ValueError(f"unexpected line {lines[i]!r}")
    if i != len(lines):
        raise ValueError("trailing data after last array")
    return {"dimensions": dims, "arrays": names}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def export_grid(path, fmt: str, coords: tuple, names: tuple, scalars: dict, vectors: dict | None = None) -> Path:
    """Write a 2D grid field in ``fmt``; returns the file path (suffix added)."""
    fmt = {"vtk-ascii": "vtk"}.get(fmt, fmt)
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {fmt!r}; choose from {FORMATS}")
    vectors = vectors or {}
    path = Path(path).with_suffix("." + fmt)
    c1, c2 = (np.asarray(c, dtype=float) for c in coords)
    if fmt == "csv":
        flat = dict(scalars)
        for name, v in vectors.items():
            v = np.asarray(v)
            for i in range(v.shape[-1]):
                flat[f"{name}_{i + 1}"] = v[..., i]
        write_csv_grid(path, (c1, c2), names, flat)
    elif fmt == "vtk":
        A, B = np.meshgrid(c1, c2, indexing="ij")
        pts = np.stack([A, B, np.zeros_like(A)], axis=-1)
        vec3 = {}
        for name, v in vectors.items():
            v = np.asarray(v, dtype=float)
            if v.shape[-1] == 2:
                v = np.concatenate([v, np.zeros(v.shape[:-1] + (1,))], axis=-1)
            vec3[name] = v
        write_vtk(path, pts, scalars, vec3)
    else:
        _check_arrays({**scalars, **vectors}, (len(c1), len(c2)))
        write_json(path, {"coords": {names[0]: c1, names[1]: c2}, "scalars": scalars, "vectors": vectors})
    return path
