"""Catalog serialization, named shapes and point-set specifications.

A catalog document is ``{"d": 2, "terms": [{"weight", "kind", "params",
"rotation", "translation"}]}`` with the rotation stored row-major.  Named
functions accept an optional ``@x,y`` translation suffix, e.g. ``square@1,0``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os

import numpy as np

from .discrepancy import PointSet, composite_pointset, lattice_pointset, recursive_decomposition
from .errors import ValidationError
from .geometry.measure import make_whisker_disk
from .geometry.shapes import BVFunction, Shape


def _named_shapes() -> dict:
    return {
        "square": ("unit square [0,1]^2", lambda a: Shape.box((0, 0), (1, 1))),
        "square2": ("square [0,2]^2", lambda a: Shape.box((0, 0), (2, 2))),
        "rect": ("box [0,a]x[0,1] (a defaults to 2)", lambda a: Shape.box((0, 0), (a or 2.0, 1))),
        "disk": ("unit disk centered at the origin", lambda a: Shape.ball((0, 0), 1.0)),
        "ball": ("disk of radius r centered at the origin (ball:r)", lambda a: Shape.ball((0, 0), a or 1.0)),
        "triangle": ("right triangle (0,0),(1,0),(0,1)", lambda a: Shape.polygon([(0, 0), (1, 0), (0, 1)])),
        "lshape": (
            "L-shaped hexagon in [0,2]^2 (non-convex)",
            lambda a: Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]),
        ),
        "cube": ("unit cube [0,1]^3", lambda a: Shape.box((0, 0, 0), (1, 1, 1))),
        "ball3": ("ball of radius r in R^3 (ball3:r)", lambda a: Shape.ball((0, 0, 0), a or 1.0)),
    }


NAMED = _named_shapes()


def catalog_listing() -> list[dict]:
    out = [{"name": k, "description": v[0]} for k, v in NAMED.items()]
    out.append({"name": "whisker", "description": "unit disk with a segment of length L attached (whisker:L)"})
    return out


def function_to_dict(u: BVFunction) -> dict:
    terms = []
    for w, s in u.terms:
        terms.append(
            {
                "weight": float(w),
                "kind": s.kind,
                "params": _plain(s.params),
                "rotation": [float(x) for x in np.asarray(s.R).ravel()],
                "translation": [float(x) for x in np.asarray(s.t)],
            }
        )
    return {"d": u.dim, "terms": terms}


def _plain(x):
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(y) for y in x]
    return float(x)


def function_from_dict(doc: dict) -> BVFunction:
    try:
        d = int(doc["d"])
        terms = []
        for t in doc["terms"]:
            kind = t["kind"]
            params = t["params"]
            rot = t.get("rotation")
            R = None if rot is None else np.asarray(rot, dtype=float).reshape(d, d)
            tr = t.get("translation")
            if kind == "box":
                s = Shape.box(params[0], params[1], rotation=R, translation=tr)
            elif kind == "ball":
                s = Shape.ball(params[0], params[1], rotation=R, translation=tr)
            elif kind == "polygon":
                s = Shape.polygon(params[0], rotation=R, translation=tr)
            else:
                raise ValidationError(f"unknown shape kind {kind!r}")
            if s.dim != d:
                raise ValidationError("term dimension does not match the catalog dimension")
            terms.append((float(t.get("weight", 1.0)), s))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed catalog document: {exc}") from exc
    return BVFunction(d, tuple(terms)) if terms else BVFunction.zero(d)


def _named(token: str) -> BVFunction:
    name, _, shift = token.partition("@")
    base, _, arg = name.partition(":")
    base = base.strip().lower()
    if base not in NAMED:
        raise ValidationError(f"unknown shape {base!r}; run `bvf catalog` for the list")
    try:
        a = float(arg) if arg else None
    except ValueError as exc:
        raise ValidationError(f"bad shape parameter in {token!r}") from exc
    if a is not None and not (a > 0 and math.isfinite(a)):
        raise ValidationError(f"shape parameter must be positive in {token!r}")
    shape = NAMED[base][1](a)
    if shift:
        try:
            v = [float(x) for x in shift.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad translation in {token!r}") from exc
        if len(v) != shape.dim:
            raise ValidationError(f"translation in {token!r} has the wrong dimension")
        shape = shape.translated(v)
    return BVFunction.indicator(shape)


def parse_function(spec) -> BVFunction:
    """A function from a catalog dict, inline JSON, a JSON file, or ``name[+name...]``."""
    if isinstance(spec, BVFunction):
        return spec
    if isinstance(spec, dict):
        return function_from_dict(spec)
    if not isinstance(spec, str) or not spec.strip():
        raise ValidationError("empty function specification")
    s = spec.strip()
    if s.startswith("{"):
        try:
            return function_from_dict(json.loads(s))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid catalog JSON: {exc}") from exc
    if os.path.isfile(s):
        with open(s, encoding="utf-8") as fh:
            try:
                return function_from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"invalid catalog JSON in {s}: {exc}") from exc
    parts = [p for p in s.split("+") if p]
    u = _named(parts[0])
    for p in parts[1:]:
        u = u + _named(p)
    return u


def parse_region(spec: str):
    """A single region for the Minkowski commands: a named shape or ``whisker:L``."""
    base, _, arg = spec.partition(":")
    if base.strip().lower() == "whisker":
        try:
            L = float(arg) if arg else 1.0
        except ValueError as exc:
            raise ValidationError(f"bad whisker length in {spec!r}") from exc
        return make_whisker_disk(L)
    u = parse_function(spec)
    if len(u.terms) != 1 or u.terms[0][0] != 1.0:
        raise ValidationError("a region must be a single shape")
    return u.terms[0][1]


def parse_pointset(spec: str, d: int = 2, seed: int = 0) -> PointSet:
    """``lattice:m``, ``composite:N``, ``random:N``, or a CSV file with one point per row."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind in ("lattice", "composite", "random"):
        try:
            n = int(arg)
        except ValueError as exc:
            raise ValidationError(f"bad point-set size in {spec!r}") from exc
        if n < 1:
            raise ValidationError("point-set size must be positive")
        if kind == "lattice":
            return lattice_pointset(n, d)
        if kind == "composite":
            return composite_pointset(recursive_decomposition(n, d), seed)
        return PointSet.random(n, d, seed)
    if os.path.isfile(spec):
        pts = np.loadtxt(spec, delimiter=",", ndmin=2)
        if pts.shape[1] != d:
            raise ValidationError(f"point file has dimension {pts.shape[1]}, expected {d}")
        if np.any(pts < 0) or np.any(pts >= 1):
            raise ValidationError("points must lie in [0, 1)^d")
        return PointSet.explicit(pts)
    raise ValidationError(f"unknown point-set specification {spec!r}")


def pointset_csv(P: PointSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(P.d)])
    for p in P.points:
        w.writerow([repr(float(x)) for x in p])
    return buf.getvalue()


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def jsonable(x):
    """Recursively convert numpy scalars/arrays and complex numbers for JSON output."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x
