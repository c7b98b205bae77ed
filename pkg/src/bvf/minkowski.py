"""Outer Minkowski content, dilations and the Fourier difference quotient.

For a convex polygon ``Omega`` the dilation ``Omega + B_h`` is bounded by the
edges pushed out by ``h`` and by circular arcs of radius ``h`` around the
vertices.  Its Fourier transform comes from the boundary formula

    1^_D(xi) = (-2 pi i |xi|^2)^{-1} int_{dD} (xi . n) e^{-2 pi i xi.x} ds,

closed form on segments and Gauss-Legendre on arcs.  Near ``xi = 0`` the
nonsingular field ``x_1 E(xi_1 x_1) e^{-2 pi i xi_2 x_2}`` with
``E(z) = (e^{-2 pi i z} - 1) / (-2 pi i z)`` replaces the singular one.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from .errors import QuadratureError, ValidationError
from .geometry.measure import WhiskerDisk, dilated_volume_estimate, monte_carlo_dilation
from .geometry.shapes import BALL, Shape, segment_ft
from .spectral import AsymptoteEstimate

DEFAULT_H_GRID = 0.2 * 2.0 ** -np.arange(8)  # 0.2 down to 1.5625e-3
_FT_TOL = 1e-12


@dataclass(frozen=True)
class RoundedRegion:
    """Boundary of ``Omega + B_h`` for a convex polygon ``Omega``.

    ``segments`` are the offset edges ``(P, Q, outward normal)`` and ``arcs``
    are ``(vertex, theta0, theta1)`` with radius ``h``; arcs sweep
    counterclockwise and their spans add up to ``2 pi``.
    """

    base: Shape
    h: float
    segments: tuple = field(repr=False)
    arcs: tuple = field(repr=False)

    @classmethod
    def from_polygon(cls, shape: Shape, h: float) -> "RoundedRegion":
        if shape.dim != 2 or shape.kind == BALL or not shape.is_convex:
            raise ValidationError("rounded regions need a convex planar polygon or box")
        if h < 0:
            raise ValidationError("h must be nonnegative")
        v = shape.world_vertices
        e = np.roll(v, -1, axis=0) - v
        normals = np.stack([e[:, 1], -e[:, 0]], axis=-1) / np.linalg.norm(e, axis=1)[:, None]
        segs = tuple((v[k] + h * normals[k], v[(k + 1) % len(v)] + h * normals[k], normals[k]) for k in range(len(v)))
        arcs = []
        for k in range(len(v)):
            n_in = normals[k - 1]
            n_out = normals[k]
            t0 = math.atan2(n_in[1], n_in[0])
            t1 = math.atan2(n_out[1], n_out[0])
            while t1 < t0:
                t1 += 2 * math.pi
            if t1 - t0 > 1e-15:
                arcs.append((v[k].copy(), t0, t1))
        return cls(shape, float(h), segs, tuple(arcs))

    @property
    def area(self) -> float:
        return self.base.volume + self.h * self.base.perimeter + math.pi * self.h**2

    @property
    def perimeter(self) -> float:
        return self.base.perimeter + 2 * math.pi * self.h

    @property
    def arc_span(self) -> float:
        return float(sum(t1 - t0 for _, t0, t1 in self.arcs))


def _E(z: np.ndarray) -> np.ndarray:
    """``(e^{-2 pi i z} - 1) / (-2 pi i z)``, entire, with a series near 0."""
    z = np.asarray(z, dtype=float)
    w = -2j * np.pi * z
    small = np.abs(w) < 1e-3
    safe = np.where(small, 1.0, w)
    direct = np.expm1(safe) / safe
    series = 1 + w / 2 + w * w / 6 + w**3 / 24
    return np.where(small, series, direct)


def _arc_points(center, t0, t1, h, n):
    x, w = legendre.leggauss(n)
    th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x
    nrm = np.stack([np.cos(th), np.sin(th)], axis=-1)
    pts = center + h * nrm
    return pts, nrm, 0.5 * (t1 - t0) * h * w


def _seg_points(P, Q, n):
    x, w = legendre.leggauss(n)
    s = 0.5 * (x + 1)
    pts = P + s[:, None] * (Q - P)
    return pts, 0.5 * np.linalg.norm(Q - P) * w


def _ft_regular(region: RoundedRegion, xi: np.ndarray, shift: np.ndarray, n_arc: int) -> complex:
    k2 = float(xi @ xi)
    total = 0.0 + 0.0j
    for P, Q, nrm in region.segments:
        total += float(xi @ nrm) * complex(segment_ft(xi, P - shift, Q - shift))
    for V, t0, t1 in region.arcs:
        pts, nrm, w = _arc_points(V - shift, t0, t1, region.h, n_arc)
        total += np.sum((nrm @ xi) * np.exp(-2j * np.pi * (pts @ xi)) * w)
    return total / (-2j * np.pi * k2)


def _ft_small(region: RoundedRegion, xi: np.ndarray, shift: np.ndarray, n_arc: int) -> complex:
    def field(pts):
        return pts[:, 0] * _E(xi[0] * pts[:, 0]) * np.exp(-2j * np.pi * xi[1] * pts[:, 1])

    total = 0.0 + 0.0j
    for P, Q, nrm in region.segments:
        pts, w = _seg_points(P - shift, Q - shift, 8)
        total += np.sum(field(pts) * nrm[0] * w)
    for V, t0, t1 in region.arcs:
        pts, nrm, w = _arc_points(V - shift, t0, t1, region.h, n_arc)
        total += np.sum(field(pts) * nrm[:, 0] * w)
    return total


def ft_rounded(region: RoundedRegion, xi) -> complex:
    """Fourier transform of the indicator of ``Omega + B_h``."""
    xi = np.asarray(xi, dtype=float)
    if region.h == 0.0:
        return complex(region.base.fourier(xi))
    if not np.any(xi):
        return complex(region.area)
    c, rad = region.base.bounding_ball
    shift = np.asarray(c, dtype=float)
    scale = float(np.linalg.norm(xi)) * (rad + region.h)
    fn = _ft_small if scale < 1e-2 else _ft_regular
    n = 8
    prev = fn(region, xi, shift, n)
    while n < 1024:
        n *= 2
        cur = fn(region, xi, shift, n)
        if abs(cur - prev) <= _FT_TOL * max(region.area, abs(cur)):
            return complex(cur * np.exp(-2j * np.pi * (xi @ shift)))
        prev = cur
    raise QuadratureError("arc quadrature for the rounded region did not converge")


def whisker_dilation_ft(w: WhiskerDisk, h: float, xi) -> complex:
    """Fourier transform of the indicator of ``W + B_h`` for the whisker disk (``L > h``)."""
    if not 0 < h < w.L:
        raise ValidationError("whisker dilation transform needs 0 < h < L")
    xi = np.asarray(xi, dtype=float)
    disk = Shape.ball((0.0, 0.0), 1.0 + h)
    base = complex(disk.fourier(xi))
    # part outside the big disk: |y| < h, sqrt((1+h)^2 - y^2) < x < 1 + L + sqrt(h^2 - y^2),
    # integrated in y = h sin(phi) so the endpoint square roots are smooth
    n = 16
    prev = None
    while n <= 2048:
        x, wt = legendre.leggauss(n)
        phi = 0.5 * math.pi * x
        y = h * np.sin(phi)
        dy = h * np.cos(phi) * 0.5 * math.pi * wt
        xa = np.sqrt((1.0 + h) ** 2 - y * y)
        xb = 1.0 + w.L + h * np.cos(phi)
        if xi[0] == 0.0:
            inner = xb - xa
        else:
            k = -2j * np.pi * xi[0]
            inner = (np.exp(k * xb) - np.exp(k * xa)) / k
        val = complex(np.sum(inner * np.exp(-2j * np.pi * xi[1] * y) * dy))
        if prev is not None and abs(val - prev) <= _FT_TOL * max(abs(val), 1e-3):
            return base + val
        prev = val
        n *= 2
    raise QuadratureError("whisker transform quadrature did not converge")


# ---------------------------------------------------------------------------
# families and limits


@dataclass(frozen=True)
class DilationFamily:
    base: object
    h: np.ndarray
    volume: np.ndarray
    mu_mass: np.ndarray
    sm: float
    residual: float
    method: str
    half_width: np.ndarray

    def to_csv(self) -> str:
        return _csv(["h", "volume", "mu_mass", "half_width"], [self.h, self.volume, self.mu_mass, self.half_width])


def _csv(header, cols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*cols):
        w.writerow([x if isinstance(x, str) else repr(float(x)) for x in row])
    return buf.getvalue()


def _linear_limit(h: np.ndarray, q: np.ndarray) -> tuple[float, float]:
    """Linear-in-h extrapolation from the two smallest h, with the previous pair as residual."""
    order = np.argsort(h)
    h, q = h[order], q[order]
    if len(h) == 1:
        return float(q[0]), math.nan
    lim = (h[1] * q[0] - h[0] * q[1]) / (h[1] - h[0])
    if len(h) >= 3:
        prev = (h[2] * q[1] - h[1] * q[2]) / (h[2] - h[1])
        return complex(lim) if np.iscomplexobj(q) else float(lim), float(abs(lim - prev))
    return complex(lim) if np.iscomplexobj(q) else float(lim), math.nan


def dilation_family(region, h_grid=None, samples: int = 1_000_000, seed: int = 0) -> DilationFamily:
    h = np.sort(np.asarray(DEFAULT_H_GRID if h_grid is None else h_grid, dtype=float))[::-1]
    if np.any(h <= 0):
        raise ValidationError("h values must be positive")
    vols, hw = [], []
    if isinstance(region, WhiskerDisk):
        vols = [region.dilated_area(float(x)) for x in h]
        hw = [0.0] * len(h)
        method = "exact"
        base_vol = region.volume
    else:
        method = "steiner"
        for k, x in enumerate(h):
            est = dilated_volume_estimate(region, float(x), samples, seed + k)
            vols.append(est.value)
            hw.append(est.half_width)
            if est.method != "steiner":
                method = est.method
        base_vol = region.volume
    vols = np.array(vols)
    mu = (vols - base_vol) / h
    sm, res = _linear_limit(h, mu)
    return DilationFamily(region, h, vols, mu, float(sm), res, method, np.array(hw))


def outer_minkowski_content(region, h_grid=None, samples: int = 1_000_000, seed: int = 0) -> float:
    """``lim_{h -> 0} |Omega_h minus Omega| / h``."""
    return dilation_family(region, h_grid, samples, seed).sm


def _dilated_ft(region, h: float, xi) -> complex:
    if isinstance(region, WhiskerDisk):
        if not np.any(xi):
            return complex(region.dilated_area(h))
        return whisker_dilation_ft(region, h, xi)
    if region.kind == BALL:
        c, r = region.bounding_ball
        return complex(Shape.ball(c, r + h).fourier(xi))
    return ft_rounded(RoundedRegion.from_polygon(region, h), xi)


def ft_difference_quotient(region, xi, h_grid=None) -> AsymptoteEstimate:
    """``(1^_{Omega + B_h}(xi) - 1^_Omega(xi)) / h`` over ``h``, extrapolated linearly to 0.

    ``diagnostics['target']`` holds the perimeter-measure transform at ``xi``.
    """
    xi = np.asarray(xi, dtype=float)
    h = np.sort(np.asarray(DEFAULT_H_GRID if h_grid is None else h_grid, dtype=float))[::-1]
    base = complex(region.fourier(xi))
    q = np.array([(_dilated_ft(region, float(x), xi) - base) / x for x in h])
    lim, res = _linear_limit(h, q)
    target = complex(region.perimeter_fourier(xi))
    return AsymptoteEstimate(
        "difference_quotient",
        h,
        q,
        lim,
        res,
        {"target": target, "abs_err": abs(lim - target), "xi": [float(a) for a in xi]},
    )


# ---------------------------------------------------------------------------
# weak convergence probe


@dataclass(frozen=True)
class ProbeFunction:
    """A bounded continuous test function: ``cos``/``sin`` of ``2 pi xi.x`` or a Gaussian bump."""

    kind: str
    params: tuple

    @property
    def ident(self) -> str:
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in np.ravel(self.params))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "one":
            return np.ones(x.shape[:-1])
        if self.kind in ("cos", "sin"):
            phase = 2 * np.pi * (x @ np.asarray(self.params, dtype=float))
            return np.cos(phase) if self.kind == "cos" else np.sin(phase)
        if self.kind == "bump":
            cx, cy, rho = self.params
            d2 = (x[..., 0] - cx) ** 2 + (x[..., 1] - cy) ** 2
            return np.exp(-d2 / (rho * rho))
        raise ValidationError(f"unknown test function {self.kind!r}")


def _collar_integral(region, h: float, phi: ProbeFunction, n: int) -> float:
    """``int_{Omega_h minus Omega} phi`` for a convex polygon or a ball."""
    xg, wg = legendre.leggauss(n)
    xs, ws = 0.5 * (xg + 1), 0.5 * wg
    total = 0.0
    if region.kind == BALL:
        c, r = region.bounding_ball
        th = np.pi * (xg + 1)
        rad = r + h * xs
        pts = c + rad[:, None, None] * np.stack([np.cos(th), np.sin(th)], -1)[None]
        vals = phi(pts) * rad[:, None]
        return float(h * np.pi * ws @ vals @ wg)
    v = region.world_vertices
    rr = RoundedRegion.from_polygon(region, h)
    for k, (P, Q, nrm) in enumerate(rr.segments):
        a, b = v[k], v[(k + 1) % len(v)]
        L = float(np.linalg.norm(b - a))
        pts = a + xs[:, None, None] * (b - a) + (h * xs)[None, :, None] * nrm
        total += L * h * float(ws @ phi(pts) @ ws)
    for V, t0, t1 in rr.arcs:
        th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xg
        rad = h * xs
        pts = V + rad[:, None, None] * np.stack([np.cos(th), np.sin(th)], -1)[None]
        total += 0.5 * (t1 - t0) * h * float((ws * rad) @ phi(pts) @ wg)
    return total


def boundary_integral(region, phi: ProbeFunction, n: int = 64) -> float:
    """``int phi d|D 1_Omega|``: line integral of ``phi`` over the boundary."""
    xg, wg = legendre.leggauss(n)
    if region.kind == BALL:
        c, r = region.bounding_ball
        th = np.pi * (xg + 1)
        pts = c + r * np.stack([np.cos(th), np.sin(th)], -1)
        return float(np.pi * r * wg @ phi(pts))
    v = region.world_vertices
    total = 0.0
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        pts = a + (0.5 * (xg + 1))[:, None] * (b - a)
        total += 0.5 * float(np.linalg.norm(b - a)) * float(wg @ phi(pts))
    return total


@dataclass(frozen=True)
class ProbeRow:
    phi_id: str
    h: float
    value: float
    target: float
    abs_err: float


@dataclass(frozen=True)
class ProbeTable:
    rows: tuple[ProbeRow, ...]
    limits: dict
    verdicts: dict
    note: str = "finitely many test functions probed; weak convergence is not certified"

    def to_csv(self) -> str:
        return _csv(
            ["phi_id", "h", "value", "target", "abs_err"],
            [
                [r.phi_id for r in self.rows],
                [r.h for r in self.rows],
                [r.value for r in self.rows],
                [r.target for r in self.rows],
                [r.abs_err for r in self.rows],
            ],
        )


def default_test_functions(region) -> list[ProbeFunction]:
    out = [ProbeFunction("one", ())]
    for xi in [(1.0, 0.0), (0.5, 0.5), (0.3, -1.2)]:
        out += [ProbeFunction("cos", xi), ProbeFunction("sin", xi)]
    if region.kind != BALL:
        v = region.world_vertices
        m = 0.5 * (v[0] + v[1])
        out.append(ProbeFunction("bump", (float(m[0]), float(m[1]), 0.3)))
    else:
        c, r = region.bounding_ball
        out.append(ProbeFunction("bump", (float(c[0] + r), float(c[1]), 0.3)))
    return out


def weak_convergence_probe(region: Shape, test_functions=None, h_grid=None, tol: float = 1e-3, n: int = 48) -> ProbeTable:
    """Trace ``int phi d mu_h`` with ``mu_h = h^{-1} 1_{Omega_h minus Omega} dx`` against ``int phi d|D 1_Omega|``."""
    if region.dim != 2 or not region.is_convex:
        raise ValidationError("the probe needs a convex planar polygon, box or disk")
    tfs = default_test_functions(region) if test_functions is None else list(test_functions)
    h = np.sort(np.asarray(DEFAULT_H_GRID if h_grid is None else h_grid, dtype=float))[::-1]
    rows = []
    limits, verdicts = {}, {}
    for phi in tfs:
        target = boundary_integral(region, phi)
        vals = np.array([_collar_integral(region, float(x), phi, n) / x for x in h])
        for x, val in zip(h, vals):
            rows.append(ProbeRow(phi.ident, float(x), float(val), target, abs(float(val) - target)))
        lim, _ = _linear_limit(h, vals)
        limits[phi.ident] = float(lim)
        verdicts[phi.ident] = bool(abs(lim - target) <= tol * max(1.0, abs(target)))
    return ProbeTable(tuple(rows), limits, verdicts)


__all__ = [
    "DEFAULT_H_GRID",
    "RoundedRegion",
    "ft_rounded",
    "whisker_dilation_ft",
    "DilationFamily",
    "dilation_family",
    "outer_minkowski_content",
    "ft_difference_quotient",
    "ProbeFunction",
    "boundary_integral",
    "ProbeRow",
    "ProbeTable",
    "default_test_functions",
    "weak_convergence_probe",
    "monte_carlo_dilation",
]
