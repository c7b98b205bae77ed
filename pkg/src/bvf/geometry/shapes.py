"""Shapes and piecewise-constant BV functions built from them.

A shape is a canonical region (axis box, ball, simple polygon) placed in space
by a rigid motion ``x = R @ y + t``.  A :class:`BVFunction` is a finite weighted
sum of shape indicators.  Both are immutable and hashable so that derived
spectral profiles can be cached by value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import ValidationError
from ..special import j0, j1

Vector = tuple[float, ...]

BOX, BALL, POLYGON = "box", "ball", "polygon"


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _as_tuple(v) -> Vector:
    return tuple(float(a) for a in np.asarray(v, dtype=float).ravel())


def _as_matrix(m, d: int) -> tuple[Vector, ...] | None:
    if m is None:
        return None
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 0 and d == 2:
        c, s = math.cos(float(arr)), math.sin(float(arr))
        arr = np.array([[c, -s], [s, c]])
    arr = arr.reshape(d, d)
    if not np.allclose(arr @ arr.T, np.eye(d), atol=1e-10):
        raise ValidationError("rotation must be orthogonal")
    if np.linalg.det(arr) < 0:
        raise ValidationError("rotation must have determinant +1")
    if np.allclose(arr, np.eye(d), atol=0.0):
        return None
    return tuple(tuple(float(a) for a in row) for row in arr)


def rotation_2d(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def _check_simple(vertices: np.ndarray) -> None:
    n = len(vertices)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]):
                raise ValidationError("polygon is not simple")


@dataclass(frozen=True)
class Shape:
    """A rigidly placed canonical region.

    ``params`` holds ``(lo, hi)`` for boxes, ``(center, radius)`` for balls and
    ``(vertices,)`` for polygons, all as tuples.  Use the :meth:`box`,
    :meth:`ball` and :meth:`polygon` constructors rather than building the
    tuple by hand.
    """

    kind: str
    params: tuple
    rotation: tuple | None = None
    translation: Vector | None = None

    def __post_init__(self):
        d = self.dim
        if self.kind == BOX:
            lo, hi = self.params
            if len(lo) != len(hi) or d < 1:
                raise ValidationError("box corners must share a dimension")
            if not all(a < b for a, b in zip(lo, hi)):
                raise ValidationError("box needs lo < hi componentwise")
        elif self.kind == BALL:
            center, radius = self.params
            if not radius > 0:
                raise ValidationError("ball radius must be positive")
            if d not in (2, 3):
                raise ValidationError("balls are supported in d = 2, 3 only")
        elif self.kind == POLYGON:
            (verts,) = self.params
            v = np.asarray(verts, dtype=float)
            if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
                raise ValidationError("polygon needs at least 3 planar vertices")
            if len({tuple(p) for p in verts}) != len(verts):
                raise ValidationError("polygon has repeated vertices")
            if _signed_area(v) <= 0:
                raise ValidationError("polygon must be counterclockwise")
            _check_simple(v)
        else:
            raise ValidationError(f"unknown shape kind {self.kind!r}")
        if self.translation is not None and len(self.translation) != d:
            raise ValidationError("translation has wrong dimension")

    # -- constructors ---------------------------------------------------
    @classmethod
    def box(cls, lo, hi, rotation=None, translation=None) -> "Shape":
        lo, hi = _as_tuple(lo), _as_tuple(hi)
        return cls._placed(BOX, (lo, hi), len(lo), rotation, translation)

    @classmethod
    def ball(cls, center, radius: float, rotation=None, translation=None) -> "Shape":
        center = _as_tuple(center)
        return cls._placed(BALL, (center, float(radius)), len(center), rotation, translation)

    @classmethod
    def polygon(cls, vertices, rotation=None, translation=None) -> "Shape":
        verts = tuple(_as_tuple(p) for p in vertices)
        return cls._placed(POLYGON, (verts,), 2, rotation, translation)

    @classmethod
    def _placed(cls, kind, params, d, rotation, translation) -> "Shape":
        rot = _as_matrix(rotation, d)
        tr = None
        if translation is not None:
            tr = _as_tuple(translation)
            if not any(tr):
                tr = None
        return cls(kind, params, rot, tr)

    # -- placement ------------------------------------------------------
    @property
    def dim(self) -> int:
        if self.kind == BOX:
            return len(self.params[0])
        if self.kind == BALL:
            return len(self.params[0])
        return 2

    @property
    def R(self) -> np.ndarray:
        if self.rotation is None:
            return np.eye(self.dim)
        return np.array(self.rotation)

    @property
    def t(self) -> np.ndarray:
        if self.translation is None:
            return np.zeros(self.dim)
        return np.array(self.translation)

    @property
    def axis_aligned(self) -> bool:
        return self.rotation is None

    def to_world(self, y: np.ndarray) -> np.ndarray:
        return y @ self.R.T + self.t

    def to_canonical(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.t) @ self.R

    def translated(self, shift) -> "Shape":
        return Shape._placed(self.kind, self.params, self.dim, self.rotation, self.t + np.asarray(shift, float))

    def rotated(self, rotation) -> "Shape":
        """Apply ``x -> Q x`` to the region (about the origin)."""
        q = np.asarray(_as_matrix(rotation, self.dim) or np.eye(self.dim))
        return Shape._placed(self.kind, self.params, self.dim, q @ self.R, q @ self.t)

    def scaled(self, lam: float) -> "Shape":
        """The region ``lam * S`` (support of ``x -> 1_S(x / lam)``)."""
        lam = float(lam)
        if self.kind == BOX:
            params = (tuple(lam * a for a in self.params[0]), tuple(lam * a for a in self.params[1]))
        elif self.kind == BALL:
            params = (tuple(lam * a for a in self.params[0]), lam * self.params[1])
        else:
            params = (tuple(tuple(lam * a for a in p) for p in self.params[0]),)
        return Shape._placed(self.kind, params, self.dim, self.rotation, lam * self.t)

    # -- measures -------------------------------------------------------
    @cached_property
    def volume(self) -> float:
        if self.kind == BOX:
            lo, hi = self.params
            return float(np.prod(np.subtract(hi, lo)))
        if self.kind == BALL:
            return ball_volume(self.dim) * self.params[1] ** self.dim
        return _signed_area(np.array(self.params[0]))

    @cached_property
    def perimeter(self) -> float:
        if self.kind == BOX:
            sides = np.subtract(self.params[1], self.params[0])
            d = len(sides)
            if d == 1:
                return 2.0
            return float(2.0 * sum(np.prod(np.delete(sides, i)) for i in range(d)))
        if self.kind == BALL:
            return sphere_area(self.dim) * self.params[1] ** (self.dim - 1)
        v = np.array(self.params[0])
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    @cached_property
    def bounding_ball(self) -> tuple[np.ndarray, float]:
        """A ball (world center, radius) containing the shape."""
        if self.kind == BALL:
            c = np.array(self.params[0])
            return self.to_world(c), float(self.params[1])
        if self.kind == BOX:
            lo, hi = np.array(self.params[0]), np.array(self.params[1])
            c = 0.5 * (lo + hi)
            return self.to_world(c), float(0.5 * np.linalg.norm(hi - lo))
        v = np.array(self.params[0])
        c = 0.5 * (v.min(axis=0) + v.max(axis=0))
        return self.to_world(c), float(np.max(np.linalg.norm(v - c, axis=1)))

    @cached_property
    def diameter(self) -> float:
        if self.kind == BALL:
            return 2.0 * self.params[1]
        if self.kind == BOX:
            return float(np.linalg.norm(np.subtract(self.params[1], self.params[0])))
        v = np.array(self.params[0])
        diff = v[:, None, :] - v[None, :, :]
        return float(np.max(np.linalg.norm(diff, axis=-1)))

    @cached_property
    def world_vertices(self) -> np.ndarray:
        """Counterclockwise vertices of a planar box or polygon in world coordinates."""
        if self.dim != 2 or self.kind == BALL:
            raise ValidationError("world_vertices needs a planar box or polygon")
        if self.kind == BOX:
            (x0, y0), (x1, y1) = self.params
            v = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
        else:
            v = np.array(self.params[0])
        return self.to_world(v)

    @cached_property
    def is_convex(self) -> bool:
        if self.kind != POLYGON:
            return True
        v = np.array(self.params[0])
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        return bool(np.all(cross >= -1e-14 * np.max(np.abs(v)) ** 2))

    def vertex_moments(self) -> tuple[float, np.ndarray, np.ndarray]:
        """Area, first moment vector and second moment matrix of a planar polygon/box."""
        v = self.world_vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        area = 0.5 * cr.sum()
        mx = ((x + xn) * cr).sum() / 6.0
        my = ((y + yn) * cr).sum() / 6.0
        mxx = ((x * x + x * xn + xn * xn) * cr).sum() / 12.0
        myy = ((y * y + y * yn + yn * yn) * cr).sum() / 12.0
        mxy = ((x * yn + 2 * x * y + 2 * xn * yn + xn * y) * cr).sum() / 24.0
        return float(area), np.array([mx, my]), np.array([[mxx, mxy], [mxy, myy]])

    # -- membership -----------------------------------------------------
    def contains(self, x) -> np.ndarray:
        """Strict interior membership of points ``x`` with shape (..., d)."""
        y = self.to_canonical(x)
        if self.kind == BOX:
            lo, hi = np.array(self.params[0]), np.array(self.params[1])
            return np.all((y > lo) & (y < hi), axis=-1)
        if self.kind == BALL:
            c = np.array(self.params[0])
            return np.sum((y - c) ** 2, axis=-1) < self.params[1] ** 2
        return _point_in_polygon(y, np.array(self.params[0]))

    def distance(self, x) -> np.ndarray:
        """Euclidean distance from points to the (closed) shape."""
        y = self.to_canonical(x)
        if self.kind == BOX:
            lo, hi = np.array(self.params[0]), np.array(self.params[1])
            gap = np.maximum(np.maximum(lo - y, y - hi), 0.0)
            return np.linalg.norm(gap, axis=-1)
        if self.kind == BALL:
            c = np.array(self.params[0])
            return np.maximum(np.linalg.norm(y - c, axis=-1) - self.params[1], 0.0)
        v = np.array(self.params[0])
        dist = np.full(y.shape[:-1], np.inf)
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            dist = np.minimum(dist, segment_distance(y, a, b))
        inside = _point_in_polygon(y, v)
        return np.where(inside, 0.0, dist)

    # -- Fourier transforms ---------------------------------------------
    def fourier(self, xi) -> np.ndarray:
        """Fourier transform of the indicator, ``int e^{-2 pi i xi.x} dx``."""
        xi = np.asarray(xi, dtype=float)
        eta = xi @ self.R  # R^T xi, row-vector form
        phase = np.exp(-2j * np.pi * (xi @ self.t))
        if self.kind == BOX:
            lo, hi = np.array(self.params[0]), np.array(self.params[1])
            L, c = hi - lo, 0.5 * (hi + lo)
            val = np.prod(L * np.sinc(eta * L), axis=-1) * np.exp(-2j * np.pi * (eta @ c))
        elif self.kind == BALL:
            c, r = np.array(self.params[0]), self.params[1]
            rho = np.linalg.norm(eta, axis=-1)
            val = _ball_ft(rho, r, self.dim) * np.exp(-2j * np.pi * (eta @ c))
        else:
            val = _polygon_ft(eta, np.array(self.params[0]))
        return val * phase

    def perimeter_fourier(self, xi) -> np.ndarray:
        """Fourier transform of the surface measure on the boundary."""
        xi = np.asarray(xi, dtype=float)
        eta = xi @ self.R
        phase = np.exp(-2j * np.pi * (xi @ self.t))
        if self.kind == BALL:
            c, r = np.array(self.params[0]), self.params[1]
            rho = np.linalg.norm(eta, axis=-1)
            if self.dim == 2:
                val = 2 * np.pi * r * j0(2 * np.pi * r * rho)
            else:
                val = 4 * np.pi * r * r * np.sinc(2 * r * rho)
            val = val * np.exp(-2j * np.pi * (eta @ c))
        elif self.kind == BOX and self.dim != 2:
            lo, hi = np.array(self.params[0]), np.array(self.params[1])
            L, c = hi - lo, 0.5 * (hi + lo)
            factors = L * np.sinc(eta * L) * np.exp(-2j * np.pi * eta * c)
            val = np.zeros(eta.shape[:-1], dtype=complex)
            for i in range(self.dim):
                rest = np.prod(np.delete(factors, i, axis=-1), axis=-1)
                ends = np.exp(-2j * np.pi * eta[..., i] * lo[i]) + np.exp(-2j * np.pi * eta[..., i] * hi[i])
                val = val + rest * ends
        else:
            if self.kind == BOX:
                (x0, y0), (x1, y1) = self.params
                v = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
            else:
                v = np.array(self.params[0])
            val = np.zeros(eta.shape[:-1], dtype=complex)
            for a, b in zip(v, np.roll(v, -1, axis=0)):
                val = val + segment_ft(eta, a, b)
        return val * phase


def segment_distance(y: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    s = np.clip(((y - a) @ ab) / (ab @ ab), 0.0, 1.0)
    proj = a + s[..., None] * ab
    return np.linalg.norm(y - proj, axis=-1)


def segment_ft(xi: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``int_[a,b] e^{-2 pi i xi.x} ds`` over a straight segment."""
    ab = b - a
    length = float(np.linalg.norm(ab))
    mid = 0.5 * (a + b)
    return length * np.exp(-2j * np.pi * (xi @ mid)) * np.sinc(xi @ ab)


def _point_in_polygon(y: np.ndarray, v: np.ndarray) -> np.ndarray:
    px, py = y[..., 0], y[..., 1]
    inside = np.zeros(px.shape, dtype=bool)
    for (x0, y0), (x1, y1) in zip(v, np.roll(v, -1, axis=0)):
        cond = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (px < xcross)
    return inside


_SMALL_ARG = 1e-4


def _ball_ft(rho: np.ndarray, r: float, d: int) -> np.ndarray:
    z = 2 * np.pi * r * rho
    small = z < _SMALL_ARG
    zs = np.where(small, 1.0, z)
    if d == 2:
        # pi r^2 * 2 J1(z)/z
        big = np.pi * r * r * 2.0 * j1(zs) / zs
        series = np.pi * r * r * (1.0 - z * z / 8.0)
    else:
        big = 4 * np.pi * r**3 * (np.sin(zs) - zs * np.cos(zs)) / zs**3
        series = 4 * np.pi * r**3 / 3.0 * (1.0 - z * z / 10.0)
    return np.where(small, series, big)


def _polygon_ft(xi: np.ndarray, v: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    q2 = np.sum(xi * xi, axis=-1)
    diam = float(np.max(np.linalg.norm(v[:, None] - v[None], axis=-1)))
    small = np.sqrt(q2) * diam < _SMALL_ARG
    acc = np.zeros(xi.shape[:-1], dtype=complex)
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        e = b - a
        n_out = np.array([e[1], -e[0]]) / np.linalg.norm(e)
        acc = acc + (xi @ n_out) * segment_ft(xi, a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = -acc / (2j * np.pi * q2)
    if not np.any(small):
        return big
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    area = 0.5 * cr.sum()
    m1 = np.array([((x + xn) * cr).sum() / 6.0, ((y + yn) * cr).sum() / 6.0])
    mxx = ((x * x + x * xn + xn * xn) * cr).sum() / 12.0
    myy = ((y * y + y * yn + yn * yn) * cr).sum() / 12.0
    mxy = ((x * yn + 2 * x * y + 2 * xn * yn + xn * y) * cr).sum() / 24.0
    quad = xi[..., 0] ** 2 * mxx + 2 * xi[..., 0] * xi[..., 1] * mxy + xi[..., 1] ** 2 * myy
    series = area - 2j * np.pi * (xi @ m1) - 2 * np.pi**2 * quad
    return np.where(small, series, big)


@dataclass(frozen=True)
class BVFunction:
    """A finite weighted sum of shape indicators, ``u = sum_i w_i 1_{S_i}``.

    Identical shapes are merged and zero weights dropped at construction, so
    the empty term list is the canonical zero function.
    """

    dim: int
    terms: tuple[tuple[float, Shape], ...] = field(default=())

    def __post_init__(self):
        merged: dict[Shape, float] = {}
        for w, s in self.terms:
            if s.dim != self.dim:
                raise ValidationError("all shapes must share the function's dimension")
            merged[s] = merged.get(s, 0.0) + float(w)
        clean = tuple((w, s) for s, w in merged.items() if w != 0.0)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def indicator(cls, shape: Shape, weight: float = 1.0) -> "BVFunction":
        return cls(shape.dim, ((weight, shape),))

    @classmethod
    def zero(cls, dim: int) -> "BVFunction":
        return cls(dim, ())

    @classmethod
    def from_terms(cls, terms) -> "BVFunction":
        terms = tuple((float(w), s) for w, s in terms)
        if not terms:
            raise ValidationError("use BVFunction.zero(d) for the empty function")
        return cls(terms[0][1].dim, terms)

    @property
    def shapes(self) -> list[Shape]:
        return [s for _, s in self.terms]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.terms])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "BVFunction") -> "BVFunction":
        if other.dim != self.dim:
            raise ValidationError("dimension mismatch")
        return BVFunction(self.dim, self.terms + other.terms)

    def __sub__(self, other: "BVFunction") -> "BVFunction":
        return self + (-1.0) * other

    def __rmul__(self, c: float) -> "BVFunction":
        return BVFunction(self.dim, tuple((c * w, s) for w, s in self.terms))

    def __mul__(self, c: float) -> "BVFunction":
        return self.__rmul__(c)

    def __neg__(self) -> "BVFunction":
        return (-1.0) * self

    def translated(self, shift) -> "BVFunction":
        return BVFunction(self.dim, tuple((w, s.translated(shift)) for w, s in self.terms))

    def rotated(self, rotation) -> "BVFunction":
        return BVFunction(self.dim, tuple((w, s.rotated(rotation)) for w, s in self.terms))

    def scaled(self, lam: float) -> "BVFunction":
        """The function ``x -> u(x / lam)``."""
        return BVFunction(self.dim, tuple((w, s.scaled(lam)) for w, s in self.terms))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for w, s in self.terms:
            out = out + w * s.contains(x)
        return out

    def fourier(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for w, s in self.terms:
            out = out + w * s.fourier(xi)
        return out

    @cached_property
    def diam(self) -> float:
        """Upper bound on the diameter of the support (0 for the zero function)."""
        if not self.terms:
            return 0.0
        balls = [s.bounding_ball for s in self.shapes]
        best = max(s.diameter for s in self.shapes)
        for i, (ci, ri) in enumerate(balls):
            for cj, rj in balls[i + 1:]:
                best = max(best, float(np.linalg.norm(ci - cj)) + ri + rj)
        return best

    @property
    def mass(self) -> float:
        """``int u``, equal to the Fourier transform at 0."""
        return float(sum(w * s.volume for w, s in self.terms))
