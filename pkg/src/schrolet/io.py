"""File formats.

RadialFunction:   ``# {grid json}`` line, then CSV ``point_index,re,im``.
SequenceSignal:   ``# {d, grid, labels}`` line, then CSV ``label,coord_m,point_index,re,im``.
CartesianSignal:  raw little-endian float64, interleaved re/im, C order, with
                  a JSON sidecar ``<path>.json`` holding d, N, Xi.
CoefficientTable: CSV ``j,k,l,re,im,abs2`` in (j, k, l) order plus a JSON
                  sidecar with K per j and metadata.
Floats are written with 17 significant digits so files round-trip exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .frame import CoefficientTable
from .harmonics import AngularLabel
from .radial import RadialFunction, RadialGrid
from .rep import CartesianSignal, SequenceSignal


class SchemaError(ValueError):
    """Malformed file or configuration; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _f(x: float) -> str:
    return format(float(x), ".17g")


def grid_from_header(h: dict, where: str = "grid") -> RadialGrid:
    for key in ("omega_min_exp", "omega_max_exp", "Q"):
        if key not in h:
            raise SchemaError(f"{where}.{key}", "missing required field")
        if not isinstance(h[key], int) or isinstance(h[key], bool):
            raise SchemaError(f"{where}.{key}", "must be an integer")
    n_gauss = h.get("n_gauss", 16)
    try:
        return RadialGrid(h["omega_min_exp"], h["omega_max_exp"], h["Q"], n_gauss)
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from exc


def _read_header(fh, path) -> dict:
    first = fh.readline()
    if not first.startswith("#"):
        raise SchemaError(str(path), "missing '#' header line")
    try:
        return json.loads(first[1:])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:header", str(exc)) from exc


def write_radial(path, f: RadialFunction):
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(f.grid.header(), sort_keys=True) + "\n")
        wr = csv.writer(fh)
        wr.writerow(["point_index", "re", "im"])
        for p, v in enumerate(f.values):
            wr.writerow([p, _f(v.real), _f(v.imag)])


def read_radial(path) -> RadialFunction:
    with open(path, newline="") as fh:
        grid = grid_from_header(_read_header(fh, path))
        vals = np.zeros(grid.size, dtype=complex)
        for n, row in enumerate(csv.DictReader(fh)):
            try:
                vals[int(row["point_index"])] = float(row["re"]) + 1j * float(row["im"])
            except (KeyError, ValueError, IndexError, TypeError) as exc:
                raise SchemaError(f"{path}:row {n + 1}", f"bad row {row}") from exc
    return RadialFunction(grid, vals)


def write_sequence(path, s: SequenceSignal):
    head = {"d": s.d, "grid": s.grid.header(), "labels": [l.index for l in s.labels]}
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(head, sort_keys=True) + "\n")
        wr = csv.writer(fh)
        wr.writerow(["label", "coord_m", "point_index", "re", "im"])
        for lab in s.labels:
            arr = s.components[lab]
            for row, m in enumerate(lab.ms):
                for p, v in enumerate(arr[row]):
                    wr.writerow([lab.index, m, p, _f(v.real), _f(v.imag)])


def read_sequence(path) -> SequenceSignal:
    with open(path, newline="") as fh:
        head = _read_header(fh, path)
        if "d" not in head:
            raise SchemaError(f"{path}:header.d", "missing required field")
        if "grid" not in head:
            raise SchemaError(f"{path}:header.grid", "missing required field")
        d = head["d"]
        grid = grid_from_header(head["grid"], f"{path}:header.grid")
        labels = [AngularLabel(d, i) for i in head.get("labels", [])]
        sig = SequenceSignal.zeros(d, grid, labels)
        for n, row in enumerate(csv.DictReader(fh)):
            try:
                lab = AngularLabel(d, int(row["label"]))
                r = list(lab.ms).index(int(row["coord_m"]))
                sig.components[lab][r, int(row["point_index"])] = float(row["re"]) + 1j * float(row["im"])
            except (KeyError, ValueError, IndexError, TypeError) as exc:
                raise SchemaError(f"{path}:row {n + 1}", f"bad row {row}") from exc
    return sig


def write_cartesian(path, f: CartesianSignal):
    path = Path(path)
    inter = np.empty(f.values.size * 2, dtype="<f8")
    flat = f.values.ravel(order="C")
    inter[0::2], inter[1::2] = flat.real, flat.imag
    path.write_bytes(inter.tobytes())
    Path(str(path) + ".json").write_text(json.dumps({"d": f.d, "N": f.N, "Xi": f.Xi}, sort_keys=True))


def read_cartesian(path) -> CartesianSignal:
    path = Path(path)
    meta = json.loads(Path(str(path) + ".json").read_text())
    for key in ("d", "N", "Xi"):
        if key not in meta:
            raise SchemaError(f"{path}.json.{key}", "missing required field")
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    d, N = int(meta["d"]), int(meta["N"])
    if raw.size != 2 * N ** d:
        raise SchemaError(str(path), f"expected {2 * N ** d} float64 values, found {raw.size}")
    vals = (raw[0::2] + 1j * raw[1::2]).reshape((N,) * d)
    return CartesianSignal(d, N, float(meta["Xi"]), vals)


def write_coefficients(path, c: CoefficientTable):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["j", "k", "l", "re", "im", "abs2"])
        for j, k, ell, v in c.rows():
            wr.writerow([j, k, ell, _f(v.real), _f(v.imag), _f(abs(v) ** 2)])
    meta = {"K": {str(j): K for j, K in sorted(c.K.items())},
            "L": int(next(iter(c.data.values())).shape[0]) if c.data else 0, "meta": c.meta}
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str))


def read_coefficients(path) -> CoefficientTable:
    path = Path(path)
    meta = json.loads(Path(str(path) + ".json").read_text())
    if "K" not in meta or "L" not in meta:
        raise SchemaError(f"{path}.json", "needs fields K and L")
    Ks = {int(j): int(K) for j, K in meta["K"].items()}
    L = int(meta["L"])
    data = {j: np.zeros((L, 2 * K + 1), dtype=complex) for j, K in Ks.items()}
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.DictReader(fh)):
            try:
                j, k, ell = int(row["j"]), int(row["k"]), int(row["l"])
                data[j][ell, k + Ks[j]] = float(row["re"]) + 1j * float(row["im"])
            except (KeyError, ValueError, IndexError, TypeError) as exc:
                raise SchemaError(f"{path}:row {n + 1}", f"bad row {row}") from exc
    return CoefficientTable(data, Ks, meta.get("meta", {}))
