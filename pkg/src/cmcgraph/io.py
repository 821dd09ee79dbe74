"""Configuration parsing, solution export and run reports.

A configuration is one JSON document::

    {"gamma": {"kind": "analytic-circle", "params": {"center": [0, 0], "radius": 1}},
     "vertex": [0, 0, 2],              # or "infinity"
     "L": {"kind": "analytic-circle", "params": {"radius": 0.6}},
     "H": 0.8,
     "boundary_data": "from-cone",     # or {"constant": c} / {"values": [...]}
     "mesh_h": 0.05,
     "tolerances": {"newton_rtol": 1e-10},
     "seed": 0}

Parsing never raises anything but :class:`ConfigError`, whose ``path`` names
the offending field.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import CMCError, ConfigError
from .geometry import CURVE_KINDS, CurveFunction, PlanarCurve, ProblemConfig, Tolerances
from .mesh import Mesh

FLOAT_FMT = "%.17g"
DEFAULT_SEED = 0


def _number(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError("expected a finite number", path)
    if positive and not value > 0:
        raise ConfigError("expected a positive number", path)
    return float(value)


def _vector(value, n, path):
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(f"expected a list of {n} numbers", path)
    return tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(value))


def parse_curve(spec, path):
    """Curve from ``{"kind": ..., "params": {...}}`` (params may also be inline)."""
    if not isinstance(spec, dict):
        raise ConfigError("expected an object", path)
    kind = spec.get("kind")
    if kind not in CURVE_KINDS:
        raise ConfigError(f"kind must be one of {sorted(CURVE_KINDS)}", f"{path}.kind")
    params = spec.get("params", {k: v for k, v in spec.items() if k != "kind"})
    if not isinstance(params, dict):
        raise ConfigError("expected an object", f"{path}.params")
    pp = f"{path}.params"
    try:
        if kind == "analytic-circle":
            center = _vector(params.get("center", [0.0, 0.0]), 2, f"{pp}.center")
            return PlanarCurve.circle(center, _number(params.get("radius"), f"{pp}.radius", True))
        if kind == "analytic-ellipse":
            center = _vector(params.get("center", [0.0, 0.0]), 2, f"{pp}.center")
            radii = _vector(params.get("radii"), 2, f"{pp}.radii")
            return PlanarCurve.ellipse(center, radii, _number(params.get("angle", 0.0), f"{pp}.angle"))
        pts = params.get("points")
        if not isinstance(pts, list) or len(pts) < 4:
            raise ConfigError("expected at least 4 control points", f"{pp}.points")
        return PlanarCurve.spline([_vector(p, 2, f"{pp}.points[{i}]") for i, p in enumerate(pts)])
    except ConfigError:
        raise
    except (CMCError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from exc


def parse_curve_function(spec, path):
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return CurveFunction.constant(_number(spec, path))
    if not isinstance(spec, dict):
        raise ConfigError('expected "from-cone", a number, {"constant": c} or {"values": [...]}', path)
    if "constant" in spec:
        return CurveFunction.constant(_number(spec["constant"], f"{path}.constant"))
    vals = spec.get("values")
    if not isinstance(vals, list) or len(vals) < 4:
        raise ConfigError("expected at least 4 values", f"{path}.values")
    return CurveFunction([_number(x, f"{path}.values[{i}]") for i, x in enumerate(vals)])


def parse_tolerances(spec, path="tolerances"):
    if spec is None:
        return Tolerances()
    if not isinstance(spec, dict):
        raise ConfigError("expected an object", path)
    fields = Tolerances.__dataclass_fields__
    out = {}
    for key, value in spec.items():
        if key not in fields:
            raise ConfigError(f"unknown tolerance {key!r}", f"{path}.{key}")
        if key in ("newton_maxiter", "n_samples"):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError("expected a positive integer", f"{path}.{key}")
            out[key] = value
        elif key == "barrier_grid":
            g = _vector(value, 2, f"{path}.{key}")
            if any(x < 2 or x != int(x) for x in g):
                raise ConfigError("expected two integers >= 2", f"{path}.{key}")
            out[key] = (int(g[0]), int(g[1]))
        else:
            out[key] = _number(value, f"{path}.{key}", positive=True)
    return Tolerances(**out)


def parse_config(doc):
    """``(ProblemConfig, extras)`` from a decoded JSON document.

    ``extras`` holds ``seed`` and the optional ``serrin`` / ``perron`` blocks.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", "$")
    if "L" in doc:
        L = parse_curve(doc["L"], "L")
    elif "inner_curve" in doc:
        L = parse_curve(doc["inner_curve"], "inner_curve")
    else:
        raise ConfigError("missing inner curve", "L")
    vraw = doc.get("vertex", "infinity")
    if vraw == "infinity" or vraw is None:
        vertex = None
    else:
        vertex = _vector(vraw, 3, "vertex")
        if not vertex[2] > 0:
            raise ConfigError("vertex height must be positive", "vertex[2]")
    if "gamma" in doc:
        gamma = parse_curve(doc["gamma"], "gamma")
    elif vertex is None:
        gamma = L
    else:
        raise ConfigError("missing base curve", "gamma")
    if "H" not in doc:
        raise ConfigError("missing mean curvature", "H")
    H = _number(doc["H"], "H", positive=True)
    bd = doc.get("boundary_data", "from-cone")
    boundary = "from-cone" if bd == "from-cone" else parse_curve_function(bd, "boundary_data")
    mesh_h = _number(doc.get("mesh_h", 0.05), "mesh_h", positive=True)
    tol = parse_tolerances(doc.get("tolerances"))
    base = doc.get("cone_base_height")
    base = None if base is None else parse_curve_function(base, "cone_base_height")
    seed = doc.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("expected an integer", "seed")
    extras = {"seed": seed}
    for block in ("serrin", "perron"):
        if block in doc:
            if not isinstance(doc[block], dict):
                raise ConfigError("expected an object", block)
            extras[block] = doc[block]
    try:
        cfg = ProblemConfig(gamma, vertex, L, H, boundary, mesh_h, tol, base)
    except (CMCError, ValueError) as exc:
        raise ConfigError(str(exc), "$") from exc
    return cfg, extras


def load_config(path):
    """Read and parse a JSON configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from exc
    return parse_config(doc)


def config_to_dict(config, extras=None):
    """Normalised JSON-compatible echo of a configuration."""
    d = {
        "gamma": config.gamma.to_dict(),
        "vertex": "infinity" if config.vertex is None else [float(x) for x in config.vertex],
        "L": config.L.to_dict(),
        "H": float(config.H),
        "boundary_data": "from-cone" if config.boundary_data == "from-cone" else config.boundary_data.to_dict(),
        "mesh_h": float(config.mesh_h),
        "tolerances": config.tolerances.to_dict(),
        "cone_base_height": None if config.cone_base_height is None else config.cone_base_height.to_dict(),
    }
    if extras:
        d.update({k: v for k, v in extras.items()})
    return sanitize(d)


def config_hash(config, extras=None):
    blob = json.dumps(config_to_dict(config, extras), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def sanitize(obj):
    """JSON-compatible copy; numpy scalars become Python numbers, non-finite become ``None``."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(sanitize(obj), indent=2, sort_keys=True) + "\n")


# -- solution export -------------------------------------------------------

def _check(mesh, field):
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_vertices,):
        raise ValueError(f"field has {field.size} values for {mesh.n_vertices} vertices")
    return field


def _g(x):
    return FLOAT_FMT % x


def export_solution(mesh, field, fmt):
    """Serialise the graph of ``field`` over ``mesh`` as ``obj``, ``vtk`` or ``csv`` bytes."""
    z = _check(mesh, field)
    V, T = mesh.vertices, mesh.triangles
    lines = []
    if fmt == "obj":
        lines += [f"v {_g(x)} {_g(y)} {_g(h)}" for (x, y), h in zip(V, z)]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in T]
    elif fmt == "vtk":
        n, e = len(V), len(T)
        lines += ["# vtk DataFile Version 3.0", "cmcgraph solution", "ASCII",
                  "DATASET UNSTRUCTURED_GRID", f"POINTS {n} double"]
        lines += [f"{_g(x)} {_g(y)} {_g(h)}" for (x, y), h in zip(V, z)]
        lines.append(f"CELLS {e} {4 * e}")
        lines += [f"3 {a} {b} {c}" for a, b, c in T]
        lines.append(f"CELL_TYPES {e}")
        lines += ["5"] * e
        lines += [f"POINT_DATA {n}", "SCALARS height double 1", "LOOKUP_TABLE default"]
        lines += [_g(h) for h in z]
    elif fmt == "csv":
        lines.append("x,y,value")
        lines += [f"{_g(x)},{_g(y)},{_g(h)}" for (x, y), h in zip(V, z)]
    else:
        raise ValueError("format must be obj, vtk or csv")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_csv(data):
    """Points and values from bytes written by ``export_solution(..., "csv")``."""
    text = data.decode("ascii") if isinstance(data, bytes) else data
    rows = text.strip().splitlines()
    if not rows or rows[0] != "x,y,value":
        raise ValueError("missing x,y,value header")
    arr = np.array([[float(s) for s in r.split(",")] for r in rows[1:]]).reshape(-1, 3)
    return arr[:, :2], arr[:, 2]


def save_solution(path, mesh, fields):
    """Mesh and named nodal fields as ``.npz``."""
    np.savez(path, vertices=mesh.vertices, triangles=mesh.triangles,
             boundary_vertices=mesh.boundary_vertices, boundary_params=mesh.boundary_params,
             boundary_curve=mesh.boundary_curve, **{f"field_{k}": np.asarray(v) for k, v in fields.items()})


def load_solution(path):
    try:
        with np.load(path) as z:
            mesh = Mesh(z["vertices"], z["triangles"], z["boundary_vertices"],
                        z["boundary_params"], z["boundary_curve"])
            fields = {k[6:]: z[k] for k in z.files if k.startswith("field_")}
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"not a stored solution: {exc}", str(path)) from exc
    return mesh, fields
