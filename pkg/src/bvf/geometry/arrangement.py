"""Boundary overlays: split the boundaries of several BV functions into
elementary pieces on which every function has constant one-sided values.

Two engines:

* a coordinate grid for axis-aligned boxes (any dimension), exact;
* a planar arrangement of straight segments and circles (d = 2).

Spheres in d = 3 are accepted only when they do not cross any other boundary.
Each piece carries a canonical normal (``+e_i`` on grid hyperplanes, a fixed
sign on each line, outward on circles and spheres) and the values of every
function on the side the normal points to (``plus``) and the opposite side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import OverlapNotRepresentable
from .shapes import BALL, BOX, BVFunction, Shape

SLIVER = 1e-12


@dataclass(frozen=True)
class Segment:
    a: tuple[float, float]
    b: tuple[float, float]

    @property
    def measure(self) -> float:
        return math.dist(self.a, self.b)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (np.array(self.a) + np.array(self.b))


@dataclass(frozen=True)
class Arc:
    center: tuple[float, float]
    radius: float
    theta0: float
    theta1: float

    @property
    def measure(self) -> float:
        return self.radius * (self.theta1 - self.theta0)

    @property
    def midpoint(self) -> np.ndarray:
        tm = 0.5 * (self.theta0 + self.theta1)
        return np.array(self.center) + self.radius * np.array([math.cos(tm), math.sin(tm)])


@dataclass(frozen=True)
class Rect:
    """An axis-aligned facet ``{x_axis = coord} x prod_{j != axis} [lo_j, hi_j]``."""

    axis: int
    coord: float
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    @property
    def measure(self) -> float:
        return float(np.prod([h - l for j, (l, h) in enumerate(zip(self.lo, self.hi)) if j != self.axis]))

    @property
    def midpoint(self) -> np.ndarray:
        m = 0.5 * (np.array(self.lo) + np.array(self.hi))
        m[self.axis] = self.coord
        return m


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, ...]
    radius: float

    @property
    def measure(self) -> float:
        return 4.0 * math.pi * self.radius**2

    @property
    def midpoint(self) -> np.ndarray:
        c = np.array(self.center, dtype=float)
        c[0] += self.radius
        return c


@dataclass
class Piece:
    carrier: Segment | Arc | Rect | Sphere
    normal: np.ndarray  # canonical normal (at the midpoint for curved carriers)
    plus: np.ndarray  # one-sided value per function on the normal side
    minus: np.ndarray
    group: int  # carrier group id; pieces of one line/circle/plane share it

    @property
    def measure(self) -> float:
        return self.carrier.measure

    @property
    def jump(self) -> np.ndarray:
        return self.plus - self.minus


def _pt(v) -> tuple[float, ...]:
    return tuple(float(a) for a in v)


def overlay(functions: list[BVFunction]) -> list[Piece]:
    """Elementary boundary pieces for the union of the functions' jump candidates."""
    d = functions[0].dim
    terms = [(k, w, s) for k, f in enumerate(functions) for w, s in f.terms]
    if not terms:
        return []
    shapes = [s for _, _, s in terms]
    if all(s.kind == BOX and s.axis_aligned for s in shapes):
        return _grid_overlay(terms, len(functions), d)
    if d == 2:
        return _planar_overlay(terms, len(functions))
    if d == 3 and all((s.kind == BOX and s.axis_aligned) or s.kind == BALL for s in shapes):
        return _grid_sphere_overlay(terms, len(functions))
    raise OverlapNotRepresentable(
        "exact facets are available for axis boxes (any d), planar shapes, and "
        "non-crossing balls with axis boxes in d = 3"
    )


# ---------------------------------------------------------------------------
# axis-aligned box grid


def _grid_overlay(terms, nfun: int, d: int) -> list[Piece]:
    boxes = [(k, w, np.array(s.params[0]) + s.t, np.array(s.params[1]) + s.t) for k, w, s in terms]
    coords = [np.unique(np.concatenate([[b[2][a], b[3][a]] for b in boxes])) for a in range(d)]
    scale = max(float(np.max(b[3] - b[2])) for b in boxes)
    pieces: list[Piece] = []
    group = 0
    for axis in range(d):
        others = [j for j in range(d) if j != axis]
        cells = [list(zip(coords[j][:-1], coords[j][1:])) for j in others]
        for c in coords[axis]:
            on_plane = [b for b in boxes if b[2][axis] == c or b[3][axis] == c]
            if not on_plane:
                continue
            for cell in itertools.product(*cells):
                lo = np.empty(d)
                hi = np.empty(d)
                lo[axis] = hi[axis] = c
                for j, (l, h) in zip(others, cell):
                    lo[j], hi[j] = l, h
                mid = 0.5 * (lo + hi)
                plus = np.zeros(nfun)
                minus = np.zeros(nfun)
                touched = False
                for k, w, blo, bhi in boxes:
                    if not all(blo[j] < mid[j] < bhi[j] for j in others):
                        continue
                    if blo[axis] <= c < bhi[axis]:
                        plus[k] += w
                    if blo[axis] < c <= bhi[axis]:
                        minus[k] += w
                    touched = touched or blo[axis] == c or bhi[axis] == c
                if not touched:
                    continue
                rect = Rect(axis, float(c), _pt(lo), _pt(hi))
                if rect.measure <= SLIVER * scale ** (d - 1):
                    continue
                normal = np.zeros(d)
                normal[axis] = 1.0
                if d == 2:
                    a_pt = lo.copy()
                    b_pt = hi.copy()
                    pieces.append(Piece(Segment(_pt(a_pt), _pt(b_pt)), normal, plus, minus, group))
                else:
                    pieces.append(Piece(rect, normal, plus, minus, group))
            group += 1
    return pieces


def _grid_sphere_overlay(terms, nfun: int) -> list[Piece]:
    boxes = [(k, w, s) for k, w, s in terms if s.kind == BOX]
    balls = [(k, w, s) for k, w, s in terms if s.kind == BALL]
    pieces = _grid_overlay(boxes, nfun, 3) if boxes else []
    for p in pieces:
        mid = p.carrier.midpoint
        for k, w, s in balls:
            if s.contains(mid):
                p.plus[k] += w
                p.minus[k] += w
    spheres: dict[tuple, list] = {}
    for k, w, s in balls:
        c, r = s.bounding_ball
        key = (tuple(np.round(c, 12)), round(r, 12))
        spheres.setdefault(key, []).append((k, w, s))
    group = max((p.group for p in pieces), default=-1) + 1
    all_shapes = [s for _, _, s in terms]
    for (ckey, r), members in spheres.items():
        c = np.array(ckey)
        member_shapes = {id(s) for _, _, s in members}
        for other in all_shapes:
            if id(other) in member_shapes:
                continue
            if _sphere_crosses(c, r, other):
                raise OverlapNotRepresentable("a sphere crosses another boundary in d = 3")
        probe = c + np.array([r, 0.0, 0.0])
        plus = np.zeros(nfun)
        minus = np.zeros(nfun)
        for k, w, s in terms:
            if id(s) in member_shapes:
                minus[k] += w
            elif s.contains(probe):
                plus[k] += w
                minus[k] += w
        pieces.append(Piece(Sphere(_pt(c), float(r)), np.array([1.0, 0.0, 0.0]), plus, minus, group))
        group += 1
    return pieces


def _sphere_crosses(c: np.ndarray, r: float, other: Shape) -> bool:
    if other.kind == BALL:
        c2, r2 = other.bounding_ball
        dist = float(np.linalg.norm(c - c2))
        return abs(r - r2) < dist < r + r2
    lo = np.array(other.params[0]) + other.t
    hi = np.array(other.params[1]) + other.t
    outside_gap = float(np.linalg.norm(np.maximum(np.maximum(lo - c, c - hi), 0.0)))
    if outside_gap >= r:
        return False
    inner = float(np.min(np.minimum(c - lo, hi - c)))
    return not inner >= r


# ---------------------------------------------------------------------------
# planar arrangement


@dataclass
class _Line:
    normal: np.ndarray
    offset: float
    edges: list  # (term index, s0, s1, outward dot canonical)

    @property
    def tangent(self) -> np.ndarray:
        return np.array([-self.normal[1], self.normal[0]])

    def point(self, s: float) -> np.ndarray:
        return self.offset * self.normal + s * self.tangent


@dataclass
class _Circle:
    center: np.ndarray
    radius: float
    members: list  # term indices whose ball boundary is this circle


def _planar_overlay(terms, nfun: int) -> list[Piece]:
    scale = max(s.diameter for _, _, s in terms)
    tol = 1e-10 * scale
    lines: list[_Line] = []
    circles: list[_Circle] = []
    raw_segments = []  # (a, b) for intersection tests
    for ti, (_, _, s) in enumerate(terms):
        if s.kind == BALL:
            c, r = s.bounding_ball
            for circ in circles:
                if np.linalg.norm(circ.center - c) < tol and abs(circ.radius - r) < tol:
                    circ.members.append(ti)
                    break
            else:
                circles.append(_Circle(c, r, [ti]))
            continue
        v = s.world_vertices
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            e = b - a
            n_out = np.array([e[1], -e[0]]) / np.linalg.norm(e)
            n = n_out.copy()
            if n[0] < -1e-12 or (abs(n[0]) <= 1e-12 and n[1] < 0):
                n = -n
            off = float(n @ a)
            for line in lines:
                if np.linalg.norm(line.normal - n) < 1e-10 and abs(line.offset - off) < tol:
                    break
            else:
                line = _Line(n, off, [])
                lines.append(line)
            tan = line.tangent
            s0, s1 = sorted((float(tan @ a), float(tan @ b)))
            line.edges.append((ti, s0, s1, float(np.sign(n_out @ line.normal))))
            raw_segments.append((a, b))

    pieces: list[Piece] = []
    group = 0
    for line in lines:
        cuts = [s for _, s0, s1, _ in line.edges for s in (s0, s1)]
        tan = line.tangent
        for a, b in raw_segments:
            p = _line_segment_hit(line, a, b, tol)
            if p is not None:
                cuts.append(float(tan @ p))
        for circ in circles:
            for p in _line_circle_points(line, circ):
                cuts.append(float(tan @ p))
        cuts = _dedupe(sorted(cuts), tol)
        for s0, s1 in zip(cuts[:-1], cuts[1:]):
            if s1 - s0 <= SLIVER * scale:
                continue
            sm = 0.5 * (s0 + s1)
            owners = {ti: sign for ti, e0, e1, sign in line.edges if e0 - tol <= sm <= e1 + tol}
            if not owners:
                continue
            mid = line.point(sm)
            plus, minus = _side_values(terms, nfun, mid, owners)
            seg = Segment(_pt(line.point(s0)), _pt(line.point(s1)))
            pieces.append(Piece(seg, line.normal.copy(), plus, minus, group))
        group += 1

    for circ in circles:
        angles = []
        for a, b in raw_segments:
            for p in _segment_circle_points(a, b, circ, tol):
                angles.append(math.atan2(p[1] - circ.center[1], p[0] - circ.center[0]) % (2 * math.pi))
        for other in circles:
            if other is circ:
                continue
            for p in _circle_circle_points(circ, other):
                angles.append(math.atan2(p[1] - circ.center[1], p[0] - circ.center[0]) % (2 * math.pi))
        angles = _dedupe(sorted(angles), 1e-12)
        if len(angles) >= 2 and angles[-1] - angles[0] > 2 * math.pi - 1e-12:
            angles.pop()
        if not angles:
            arcs = [(0.0, 2 * math.pi)]
        else:
            arcs = list(zip(angles, angles[1:] + [angles[0] + 2 * math.pi]))
        owners = {ti: 1.0 for ti in circ.members}
        for t0, t1 in arcs:
            if circ.radius * (t1 - t0) <= SLIVER * scale:
                continue
            arc = Arc(_pt(circ.center), float(circ.radius), float(t0), float(t1))
            tm = 0.5 * (t0 + t1)
            normal = np.array([math.cos(tm), math.sin(tm)])
            plus, minus = _side_values(terms, nfun, arc.midpoint, owners)
            pieces.append(Piece(arc, normal, plus, minus, group))
        group += 1
    return pieces


def _side_values(terms, nfun, mid, owners):
    plus = np.zeros(nfun)
    minus = np.zeros(nfun)
    for ti, (k, w, s) in enumerate(terms):
        if ti in owners:
            # interior lies opposite the outward normal
            if owners[ti] > 0:
                minus[k] += w
            else:
                plus[k] += w
        elif s.contains(mid):
            plus[k] += w
            minus[k] += w
    return plus, minus


def _dedupe(values, tol):
    out = []
    for v in values:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def _line_segment_hit(line: _Line, a, b, tol):
    da = float(line.normal @ a) - line.offset
    db = float(line.normal @ b) - line.offset
    if abs(da) <= tol and abs(db) <= tol:
        return None  # collinear, endpoints already recorded
    if da * db > 0 and min(abs(da), abs(db)) > tol:
        return None
    if abs(da - db) < 1e-300:
        return None
    lam = da / (da - db)
    if lam < -1e-12 or lam > 1 + 1e-12:
        return None
    return a + lam * (b - a)


def _line_circle_points(line: _Line, circ: _Circle):
    dist = float(line.normal @ circ.center) - line.offset
    if abs(dist) > circ.radius:
        return []
    foot = circ.center - dist * line.normal
    h = math.sqrt(max(circ.radius**2 - dist**2, 0.0))
    if h == 0.0:
        return [foot]
    return [foot + h * line.tangent, foot - h * line.tangent]


def _segment_circle_points(a, b, circ: _Circle, tol):
    e = b - a
    f = a - circ.center
    A = float(e @ e)
    B = 2 * float(f @ e)
    C = float(f @ f) - circ.radius**2
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    root = math.sqrt(disc)
    out = []
    for lam in {(-B - root) / (2 * A), (-B + root) / (2 * A)}:
        if -1e-12 <= lam <= 1 + 1e-12:
            out.append(a + lam * e)
    return out


def _circle_circle_points(c1: _Circle, c2: _Circle):
    delta = c2.center - c1.center
    dist = float(np.linalg.norm(delta))
    r1, r2 = c1.radius, c2.radius
    if dist == 0.0 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    x = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist)
    h = math.sqrt(max(r1 * r1 - x * x, 0.0))
    u = delta / dist
    perp = np.array([-u[1], u[0]])
    base = c1.center + x * u
    if h == 0.0:
        return [base]
    return [base + h * perp, base - h * perp]
