"""Plain-text point-cloud files.

The first line is ``#`` followed by a JSON header::

    # {"kind": "lorentz", "dim": 3, "params": {"curvature": -1.0}, "n": 2, "weights": "uniform"}

and each following line holds one point as space-separated floats written
with the shortest round-tripping representation. With ``"weights":
"explicit"`` the first field of every record is the point's weight. SPD
points are written as full row-major matrices and product points as the
concatenation of their component blocks. A Mahalanobis header may give its
metric inline as ``params.a`` or as ``params.a_file``, a path to a
whitespace-separated matrix relative to the cloud file.
"""

import json
import os

import numpy as np

from .errors import HadamardSWError, SchemaError
from .manifolds import make_manifold


def _resolve_params(desc, base_dir):
    desc = dict(desc)
    params = dict(desc.get("params") or {})
    if desc.get("kind") == "mahalanobis" and "a_file" in params:
        path = os.path.join(base_dir, params.pop("a_file"))
        try:
            params["a"] = np.loadtxt(path, ndmin=2).tolist()
        except OSError as exc:
            raise SchemaError(f"cannot read metric matrix {path}: {exc}") from exc
    if desc.get("kind") == "product":
        params["components"] = [_resolve_params(c, base_dir) for c in params.get("components", [])]
    desc["params"] = params
    return desc


def format_float(x):
    return repr(float(x))


def dumps_point_cloud(manifold, points, weights=None):
    manifold = make_manifold(manifold)
    flat = manifold.to_flat(points)
    header = dict(manifold.descriptor())
    header["n"] = int(flat.shape[0])
    header["weights"] = "uniform" if weights is None else "explicit"
    lines = ["# " + json.dumps(header, sort_keys=True)]
    for i, row in enumerate(flat):
        fields = [format_float(v) for v in row]
        if weights is not None:
            fields.insert(0, format_float(weights[i]))
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def write_point_cloud(path, manifold, points, weights=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_point_cloud(manifold, points, weights))


def loads_point_cloud(text, base_dir=".", source="<string>"):
    """Parse a point cloud; returns ``(manifold, points, weights_or_None)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SchemaError(f"{source}: missing '#' header line")
    try:
        header = json.loads(lines[0][1:])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise SchemaError(f"{source}: header must be a JSON object")
    manifold = make_manifold(_resolve_params(header, base_dir))
    mode = header.get("weights", "uniform")
    if mode not in ("uniform", "explicit"):
        raise SchemaError(f"{source}: weights must be 'uniform' or 'explicit'")
    explicit = mode == "explicit"
    width = manifold.n_coords + int(explicit)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != width:
            raise SchemaError(
                f"{source}: record on line {lineno} has {len(fields)} fields, expected {width}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise SchemaError(f"{source}: record on line {lineno}: {exc}") from exc
    if "n" in header and header["n"] != len(rows):
        raise SchemaError(f"{source}: header announces {header['n']} records, found {len(rows)}")
    if not rows:
        raise SchemaError(f"{source}: no records")
    data = np.array(rows)
    weights = data[:, 0] if explicit else None
    points = manifold.from_flat(data[:, int(explicit):])
    for i, pt in enumerate(points):
        try:
            manifold.check_point(pt)
        except HadamardSWError as exc:
            raise SchemaError(f"{source}: record {i + 1} (line {i + 2}) is invalid: {exc}") from exc
    if weights is not None and (np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12):
        raise SchemaError(f"{source}: weights must be nonnegative and sum to one")
    return manifold, points, weights


def read_point_cloud(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read point cloud {path}: {exc}") from exc
    return loads_point_cloud(text, os.path.dirname(os.path.abspath(path)), str(path))


def read_distance_matrix(path):
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise SchemaError(f"cannot read distance matrix {path}: {exc}") from exc
