"""Norms, region areas and dilation volumes of piecewise-constant functions.

Planar functions are cut into vertical slabs between all event abscissae
(vertices, circle extremes and pairwise boundary intersections).  Inside a
slab no two boundary curves cross, so the regions between consecutive curves
have closed-form areas (trapezoids and circular segments) and a single value
of ``u``.  Axis boxes in any dimension use the coordinate grid, and in d = 3
balls are handled by integrating planar cross-sections in z.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import QuadratureError, ValidationError
from ..parallel import stream
from .shapes import BALL, BOX, BVFunction, Shape, ball_volume, segment_distance

REL_TOL = 1e-9


@dataclass(frozen=True)
class _Line:
    p: tuple[float, float]
    q: tuple[float, float]  # p.x < q.x

    @property
    def span(self) -> tuple[float, float]:
        return self.p[0], self.q[0]

    def y(self, x: float) -> float:
        (x0, y0), (x1, y1) = self.p, self.q
        return y0 + (x - x0) * (y1 - y0) / (x1 - x0)

    def integral(self, a: float, b: float) -> float:
        return 0.5 * (self.y(a) + self.y(b)) * (b - a)


@dataclass(frozen=True)
class _CircleArc:
    c: tuple[float, float]
    r: float
    sign: int  # +1 upper half, -1 lower half

    @property
    def span(self) -> tuple[float, float]:
        return self.c[0] - self.r, self.c[0] + self.r

    def _root(self, x: float) -> float:
        return math.sqrt(max(self.r * self.r - (x - self.c[0]) ** 2, 0.0))

    def y(self, x: float) -> float:
        return self.c[1] + self.sign * self._root(x)

    def _prim(self, x: float) -> float:
        s = min(max((x - self.c[0]) / self.r, -1.0), 1.0)
        return 0.5 * ((x - self.c[0]) * self._root(x) + self.r * self.r * math.asin(s))

    def integral(self, a: float, b: float) -> float:
        return self.c[1] * (b - a) + self.sign * (self._prim(b) - self._prim(a))


def _planar_curves(shape: Shape) -> list:
    if shape.kind == BALL:
        c, r = shape.bounding_ball
        c = (float(c[0]), float(c[1]))
        return [_CircleArc(c, r, 1), _CircleArc(c, r, -1)]
    v = shape.world_vertices
    out = []
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        if a[0] == b[0]:
            continue
        p, q = (a, b) if a[0] < b[0] else (b, a)
        out.append(_Line((float(p[0]), float(p[1])), (float(q[0]), float(q[1]))))
    return out


def _line_line_x(l1: _Line, l2: _Line) -> list[float]:
    p = np.array(l1.p)
    r = np.array(l1.q) - p
    q = np.array(l2.p)
    s = np.array(l2.q) - q
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0.0:
        return []
    w = q - p
    t = (w[0] * s[1] - w[1] * s[0]) / den
    u = (w[0] * r[1] - w[1] * r[0]) / den
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return [float(p[0] + t * r[0])]
    return []


def _line_circle_x(line: _Line, c, r) -> list[float]:
    p = np.array(line.p)
    d = np.array(line.q) - p
    f = p - np.array(c)
    a = d @ d
    b = 2 * f @ d
    cc = f @ f - r * r
    disc = b * b - 4 * a * cc
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    return [float(p[0] + t * d[0]) for t in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)) if -1e-12 <= t <= 1 + 1e-12]


def _circle_circle_x(c1, r1, c2, r2) -> list[float]:
    c1, c2 = np.array(c1), np.array(c2)
    dist = float(np.linalg.norm(c2 - c1))
    if dist == 0.0 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + dist * dist) / (2 * dist)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    e = (c2 - c1) / dist
    m = c1 + a * e
    return [float(m[0] - h * e[1]), float(m[0] + h * e[1])]


def planar_regions(shapes: list[Shape]) -> list[tuple[float, np.ndarray]]:
    """Cells of the planar arrangement as ``(area, interior sample point)``.

    Every cell is a maximal vertical trapezoid-like piece between two
    boundary curves inside one slab; membership is constant on each cell.
    """
    curves = [c for s in shapes for c in _planar_curves(s)]
    events = set()
    for c in curves:
        events.update(c.span)
    circles = {}
    for c in curves:
        if isinstance(c, _CircleArc):
            circles[(c.c, c.r)] = None
    lines = [c for c in curves if isinstance(c, _Line)]
    for l1, l2 in itertools.combinations(lines, 2):
        events.update(_line_line_x(l1, l2))
    for line in lines:
        for c, r in circles:
            events.update(_line_circle_x(line, c, r))
    for (c1, r1), (c2, r2) in itertools.combinations(circles, 2):
        events.update(_circle_circle_x(c1, r1, c2, r2))
    xs = sorted(events)
    scale = max(abs(xs[-1] - xs[0]), 1.0)
    cells = []
    for a, b in zip(xs[:-1], xs[1:]):
        if b - a <= 1e-14 * scale:
            continue
        xm = 0.5 * (a + b)
        active = [c for c in curves if c.span[0] <= a + 1e-15 * scale and c.span[1] >= b - 1e-15 * scale]
        active.sort(key=lambda c: c.y(xm))
        for lo, hi in zip(active[:-1], active[1:]):
            area = hi.integral(a, b) - lo.integral(a, b)
            if area <= 0.0:
                continue
            cells.append((area, np.array([xm, 0.5 * (lo.y(xm) + hi.y(xm))])))
    return cells


def _grid_regions(shapes: list[Shape]) -> list[tuple[float, np.ndarray]]:
    d = shapes[0].dim
    lo = [np.array(s.params[0]) + s.t for s in shapes]
    hi = [np.array(s.params[1]) + s.t for s in shapes]
    coords = [np.unique(np.concatenate([[a[k], b[k]] for a, b in zip(lo, hi)])) for k in range(d)]
    cells = []
    for idx in itertools.product(*[range(len(c) - 1) for c in coords]):
        a = np.array([coords[k][i] for k, i in enumerate(idx)])
        b = np.array([coords[k][i + 1] for k, i in enumerate(idx)])
        cells.append((float(np.prod(b - a)), 0.5 * (a + b)))
    return cells


def _value_cells(u: BVFunction) -> list[tuple[float, float]]:
    shapes = u.shapes
    if all(s.kind == BOX and s.axis_aligned for s in shapes):
        cells = _grid_regions(shapes)
    elif u.dim == 2:
        cells = planar_regions(shapes)
    else:
        raise ValidationError("region arrangement needs d = 2 or axis boxes")
    return [(area, float(u(pt))) for area, pt in cells]


def _slice_3d(u: BVFunction, z: float) -> BVFunction:
    terms = []
    for w, s in u.terms:
        if s.kind == BOX:
            if not s.axis_aligned:
                raise ValidationError("rotated boxes in d = 3 are not supported here")
            lo = np.array(s.params[0]) + s.t
            hi = np.array(s.params[1]) + s.t
            if lo[2] < z < hi[2]:
                terms.append((w, Shape.box(lo[:2], hi[:2])))
        else:
            c, r = s.bounding_ball
            h2 = r * r - (z - c[2]) ** 2
            if h2 > 0:
                terms.append((w, Shape.ball(c[:2], math.sqrt(h2))))
    return BVFunction(2, tuple(terms))


def _reduce(u: BVFunction, f) -> float:
    """``sum f(value) * measure`` over the region arrangement of ``u``."""
    if u.is_zero:
        return 0.0
    if u.dim == 3 and any(s.kind == BALL for s in u.shapes):
        return _reduce_3d(u, f)
    return math.fsum(area * f(val) for area, val in _value_cells(u))


def _reduce_3d(u: BVFunction, f) -> float:
    zs = set()
    for s in u.shapes:
        if s.kind == BOX:
            zs.update([s.params[0][2] + s.t[2], s.params[1][2] + s.t[2]])
        else:
            c, r = s.bounding_ball
            zs.update([c[2] - r, c[2] + r])
    zs = sorted(zs)
    total, err = 0.0, 0.0
    for a, b in zip(zs[:-1], zs[1:]):
        val, e = integrate.quad(lambda z: _reduce(_slice_3d(u, z), f), a, b, epsabs=0.0, epsrel=1e-11, limit=200)
        total += val
        err += e
    if err > REL_TOL * max(abs(total), 1e-300):
        raise QuadratureError(f"cross-section integration error {err:.3g} above tolerance")
    return total


def l1_norm(u: BVFunction) -> float:
    return _reduce(u, abs)


def l2_norm_sq(u: BVFunction) -> float:
    return _reduce(u, lambda v: v * v)


def sup_norm(u: BVFunction) -> float:
    if u.is_zero:
        return 0.0
    if u.dim == 3 and any(s.kind == BALL for s in u.shapes):
        # values of u are sums of subsets of weights; test every nonempty
        # intersection pattern that occurs at a sample of cell points
        pts = _sample_points_3d(u)
        vals = np.abs(u(pts))
        return float(vals.max())
    return max(abs(val) for area, val in _value_cells(u) if area > 0)


def _sample_points_3d(u: BVFunction) -> np.ndarray:
    zs = set()
    for s in u.shapes:
        c, r = s.bounding_ball
        zs.update(np.linspace(c[2] - r, c[2] + r, 41)[1:-1])
    pts = []
    for z in sorted(zs):
        sl = _slice_3d(u, z)
        if sl.is_zero:
            continue
        for area, pt in planar_regions(sl.shapes) if not all(
            s.kind == BOX for s in sl.shapes
        ) else _grid_regions(sl.shapes):
            pts.append([pt[0], pt[1], z])
    return np.array(pts)


def union_volume(shapes: list[Shape]) -> float:
    """Measure of the union of the given shapes."""
    u = BVFunction.from_terms([(1.0, s) for s in shapes])
    return _reduce(u, lambda v: 1.0 if v > 0.5 else 0.0)


def overlap_area(a: Shape, b: Shape) -> float:
    """``|a cap b|``."""
    return a.volume + b.volume - union_volume([a, b])


# ---------------------------------------------------------------------------
# dilations


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    half_width: float  # 99% confidence half-width; 0 for closed forms
    method: str


def steiner_volume(shape: Shape, h: float) -> float | None:
    """Closed-form ``|shape + B_h|`` when the shape is convex and the formula is known."""
    d = shape.dim
    if shape.kind == BALL:
        return ball_volume(d) * (shape.params[1] + h) ** d
    if d == 2 and shape.is_convex:
        return shape.volume + h * shape.perimeter + math.pi * h * h
    if d == 3 and shape.kind == BOX:
        a, b, c = np.subtract(shape.params[1], shape.params[0])
        return float(a * b * c + shape.perimeter * h + math.pi * (a + b + c) * h * h + 4.0 / 3.0 * math.pi * h**3)
    return None


def monte_carlo_dilation(distance, lo, hi, h: float, samples: int, seed: int, chunk: int = 1 << 18) -> VolumeEstimate:
    """Estimate ``|{x : distance(x) <= h}|`` by uniform sampling of the box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    box = float(np.prod(hi - lo))
    hits = 0
    done = 0
    block = 0
    while done < samples:
        n = min(chunk, samples - done)
        rng = stream(seed, block)
        x = lo + (hi - lo) * rng.random((n, lo.size))
        hits += int(np.count_nonzero(distance(x) <= h))
        done += n
        block += 1
    p = hits / samples
    half = 2.5758293035489004 * box * math.sqrt(max(p * (1 - p), 0.0) / samples)
    return VolumeEstimate(box * p, half, "monte_carlo")


def tube_monte_carlo(shape: Shape, h: float, samples: int, seed: int, chunk: int = 1 << 17) -> VolumeEstimate:
    """Estimate ``|(shape + B_h) minus shape|`` for a planar polygon.

    Points are drawn from a cover of the tube by edge rectangles
    ``edge x [-h, h]`` and vertex disks of radius ``h``; each accepted point is
    weighted by one over the number of cover pieces containing it, which
    keeps the estimator unbiased and its relative error of order
    ``samples^{-1/2}`` independently of ``h``.
    """
    v = shape.world_vertices
    nv = len(v)
    e = np.roll(v, -1, axis=0) - v
    lens = np.linalg.norm(e, axis=1)
    tang = e / lens[:, None]
    nrm = np.stack([tang[:, 1], -tang[:, 0]], axis=-1)
    areas = np.concatenate([2 * h * lens, np.full(nv, math.pi * h * h)])
    total_area = float(areas.sum())
    probs = areas / total_area

    def multiplicity(x):
        rel = x[:, None, :] - v[None, :, :]
        s = np.einsum("nkd,kd->nk", rel, tang)
        t = np.einsum("nkd,kd->nk", rel, nrm)
        in_rect = (s >= 0) & (s <= lens) & (np.abs(t) <= h)
        in_disk = np.einsum("nkd,nkd->nk", rel, rel) <= h * h
        return in_rect.sum(axis=1) + in_disk.sum(axis=1)

    acc = []
    done = block = 0
    while done < samples:
        n = min(chunk, samples - done)
        rng = stream(seed, block)
        piece = rng.choice(len(areas), size=n, p=probs)
        a, b = rng.random(n), rng.random(n)
        x = np.empty((n, 2))
        rect = piece < nv
        k = piece[rect]
        x[rect] = v[k] + (a[rect] * lens[k])[:, None] * tang[k] + ((2 * b[rect] - 1) * h)[:, None] * nrm[k]
        k = piece[~rect] - nv
        rad = h * np.sqrt(a[~rect])
        ang = 2 * math.pi * b[~rect]
        x[~rect] = v[k] + rad[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        keep = (~shape.contains(x)) & (shape.distance(x) <= h)
        w = np.where(keep, 1.0 / np.maximum(multiplicity(x), 1), 0.0)
        acc.append(w)
        done += n
        block += 1
    w = np.concatenate(acc)
    mean = float(w.mean())
    half = 2.5758293035489004 * total_area * float(w.std()) / math.sqrt(len(w))
    return VolumeEstimate(total_area * mean, half, "monte_carlo")


def dilated_volume_estimate(shape: Shape, h: float, samples: int = 1_000_000, seed: int = 0) -> VolumeEstimate:
    if not h > 0:
        raise ValidationError("dilation radius must be positive")
    exact = steiner_volume(shape, h)
    if exact is not None:
        return VolumeEstimate(exact, 0.0, "steiner")
    if shape.dim == 2:
        tube = tube_monte_carlo(shape, h, samples, seed)
        return VolumeEstimate(shape.volume + tube.value, tube.half_width, "monte_carlo")
    c, r = shape.bounding_ball
    return monte_carlo_dilation(shape.distance, c - r - h, c + r + h, h, samples, seed)


def dilated_volume(shape: Shape, h: float, samples: int = 1_000_000, seed: int = 0) -> float:
    """``|shape + B_h|``: Steiner formula for convex shapes, Monte Carlo otherwise."""
    return dilated_volume_estimate(shape, h, samples, seed).value


@dataclass(frozen=True)
class WhiskerDisk:
    """The unit disk with a horizontal segment ``[(1, 0), (1 + L, 0)]`` attached.

    The segment is Lebesgue-null, so the indicator (and hence its perimeter
    and Fourier transform) is that of the disk; only dilations see it.
    """

    L: float

    @property
    def dim(self) -> int:
        return 2

    @property
    def disk(self) -> Shape:
        return Shape.ball((0.0, 0.0), 1.0)

    @property
    def indicator(self) -> BVFunction:
        return BVFunction.indicator(self.disk)

    @property
    def volume(self) -> float:
        return math.pi

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi

    @property
    def minkowski_content(self) -> float:
        return 2.0 * math.pi + 2.0 * self.L

    def fourier(self, xi) -> np.ndarray:
        return self.disk.fourier(xi)

    def perimeter_fourier(self, xi) -> np.ndarray:
        return self.disk.perimeter_fourier(xi)

    def distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.minimum(
            self.disk.distance(x), segment_distance(x, np.array([1.0, 0.0]), np.array([1.0 + self.L, 0.0]))
        )

    def dilated_area(self, h: float) -> float:
        """Exact ``|Omega + B_h|`` from the planar region arrangement."""
        if not h > 0:
            raise ValidationError("dilation radius must be positive")
        parts = [
            Shape.ball((0.0, 0.0), 1.0 + h),
            Shape.box((1.0, -h), (1.0 + self.L, h)),
            Shape.ball((1.0 + self.L, 0.0), h),
        ]
        return union_volume(parts)


def make_whisker_disk(L: float) -> WhiskerDisk:
    if not L > 0:
        raise ValidationError("whisker length must be positive")
    return WhiskerDisk(float(L))


__all__ = [
    "l1_norm",
    "l2_norm_sq",
    "sup_norm",
    "planar_regions",
    "union_volume",
    "overlap_area",
    "VolumeEstimate",
    "steiner_volume",
    "monte_carlo_dilation",
    "tube_monte_carlo",
    "dilated_volume",
    "dilated_volume_estimate",
    "WhiskerDisk",
    "make_whisker_disk",
]
