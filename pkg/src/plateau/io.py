"""Reading and writing meshes, nets and reports.

Floats are written with Python's shortest round-trip representation, so a
save followed by a load reproduces every coordinate bit for bit.  Reports
are serialised with sorted keys and carry no paths or timestamps; those go
to a separate metadata file.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import platform
import time
from pathlib import Path

import numpy as np

from .geonets import Arc, GeodesicNet, net_to_dict
from .mesh import SingularMesh, build_from_soup


class FormatError(ValueError):
    """Malformed input; ``field`` or ``line`` locates the problem."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


def to_jsonable(obj):
    """Convert numpy scalars/arrays and objects with ``to_dict`` into plain JSON values."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, set):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def report_hash(obj) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()


def write_report(obj, path) -> str:
    text = dumps(obj)
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def write_metadata(path, command: str, argv: list[str], report_sha: str | None) -> None:
    meta = {
        "command": command,
        "argv": list(argv),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "threads": os.environ.get("PLATEAU_THREADS", "1"),
        "report_sha256": report_sha,
    }
    Path(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


# -- meshes ------------------------------------------------------------------


def save_mesh(mesh: SingularMesh, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".obj":
        lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles.tolist()]
        path.write_text("\n".join(lines) + "\n")
        return
    data = {
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "vertex_labels": [lab.value for lab in mesh.vertex_labels],
    }
    path.write_text(json.dumps(data) + "\n")


def _check_rows(rows, width, name, kind):
    if not isinstance(rows, list):
        raise FormatError(f"expected a list of {width}-element rows", field=name)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise FormatError(f"row must have {width} entries", field=f"{name}[{i}]")
        for v in row:
            if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
                raise FormatError("expected integer index", field=f"{name}[{i}]")
            if kind is float and (isinstance(v, bool) or not isinstance(v, (int, float))):
                raise FormatError("expected number", field=f"{name}[{i}]")


def _parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid {what} JSON: {exc.msg}", line=exc.lineno) from None


def load_mesh(path, weld: bool = False) -> SingularMesh:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        return _load_obj(text, weld)
    data = _parse_json(text, "mesh")
    if not isinstance(data, dict):
        raise FormatError("top level must be an object")
    for key in ("vertices", "triangles"):
        if key not in data:
            raise FormatError("missing required field", field=key)
    _check_rows(data["vertices"], 3, "vertices", float)
    _check_rows(data["triangles"], 3, "triangles", int)
    n = len(data["vertices"])
    for i, t in enumerate(data["triangles"]):
        if min(t) < 0 or max(t) >= n:
            raise FormatError("index out of range", field=f"triangles[{i}]")
    if weld:
        v = np.asarray(data["vertices"], float)
        return build_from_soup(v[np.asarray(data["triangles"])])
    return SingularMesh(data["vertices"], data["triangles"])


def _load_obj(text: str, weld: bool) -> SingularMesh:
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "v":
            try:
                verts.append([float(p) for p in parts[1:4]])
            except ValueError:
                raise FormatError("bad vertex coordinates", line=lineno) from None
            if len(verts[-1]) != 3:
                raise FormatError("vertex needs three coordinates", line=lineno)
        elif parts[0] == "f":
            try:
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError:
                raise FormatError("bad face index", line=lineno) from None
            if len(idx) < 3:
                raise FormatError("face needs at least three vertices", line=lineno)
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            if min(idx) < 0 or max(idx) >= len(verts):
                raise FormatError("face index out of range", line=lineno)
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise FormatError("no faces found")
    if weld:
        v = np.asarray(verts, float)
        return build_from_soup(v[np.asarray(faces)])
    return SingularMesh(verts, faces)


# -- nets ----------------------------------------------------------------------


def save_net(net: GeodesicNet, path) -> None:
    Path(path).write_text(json.dumps(net_to_dict(net)) + "\n")


def load_net(path) -> GeodesicNet:
    data = _parse_json(Path(path).read_text(), "net")
    if not isinstance(data, dict):
        raise FormatError("top level must be an object")
    if "junctions" not in data:
        raise FormatError("missing required field", field="junctions")
    if "arcs" not in data or not isinstance(data["arcs"], list):
        raise FormatError("missing or malformed field", field="arcs")
    _check_rows(data["junctions"], 3, "junctions", float)
    nj = len(data["junctions"])
    arcs = []
    for i, a in enumerate(data["arcs"]):
        if not isinstance(a, dict):
            raise FormatError("arc must be an object", field=f"arcs[{i}]")
        for key in ("from", "to"):
            v = a.get(key)
            if v is not None and (not isinstance(v, int) or not 0 <= v < nj):
                raise FormatError("junction index invalid", field=f"arcs[{i}].{key}")
        if "samples" not in a:
            raise FormatError("missing samples", field=f"arcs[{i}].samples")
        _check_rows(a["samples"], 3, f"arcs[{i}].samples", float)
        if len(a["samples"]) < 2:
            raise FormatError("arc needs at least two samples", field=f"arcs[{i}].samples")
        arcs.append(Arc(a.get("from"), a.get("to"), np.asarray(a["samples"], float)))
    return GeodesicNet(np.asarray(data["junctions"], float).reshape(-1, 3), arcs)
