"""Heat content ``H(t) = int (T(t^2) u) v`` and its short-time jump estimators.

``T(s)`` is the heat semigroup with kernel ``(4 pi s)^{-d/2} e^{-|z|^2/(4s)}``,
so at time ``t^2`` it is a Gaussian of per-axis standard deviation
``sigma = sqrt(2) t``.  By bilinearity ``H`` is a sum over pairs of terms

    H_ij(t) = int G(s) |S_i cap (S_j + s)| ds,

and the code always works with the deficit ``D_ij(t) = H_ij(0) - H_ij(t)``,
which is the quantity the estimators divide by ``t``.

Pairs of axis boxes use the per-axis closed form
``int_a^b int_c^d phi_sigma(x - y) = F(b-c) - F(b-d) - F(a-c) + F(a-d)`` with
``F(z) = z Phi(z/sigma) + sigma^2 phi_sigma(z)``.  Other planar pairs integrate
the overlap deficit in polar coordinates around ``s = 0``: Gauss-Legendre in
the radius and in angle, with angular breakpoints at the edge directions where
the overlap area has kinks.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .errors import QuadratureError, ValidationError
from .geometry.measure import overlap_area
from .geometry.shapes import BALL, BOX, BVFunction, Shape
from .parallel import pmap
from .special import erf, erfc
from .spectral import AsymptoteEstimate

_SQRT_PI = math.sqrt(math.pi)
HEAT_TOL = 1e-8
_GAUSS_CUT = math.sqrt(math.log(1e17))  # e^{-rho^2/(4t^2)} < 1e-17 beyond 2t times this


# ---------------------------------------------------------------------------
# closed forms for intervals


def _F(z, t: float):
    """Second antiderivative of the 1D kernel of variance ``2 t^2``."""
    z = np.asarray(z, dtype=float)
    return 0.5 * z * (1.0 + erf(z / (2.0 * t))) + (t / _SQRT_PI) * np.exp(-z * z / (4.0 * t * t))


def _dF_dt(z, t: float):
    z = np.asarray(z, dtype=float)
    return np.exp(-z * z / (4.0 * t * t)) / _SQRT_PI


def interval_overlap(a, b, c, d, t: float) -> np.ndarray:
    """``int_a^b int_c^d G(x - y) dy dx`` for the 1D kernel at time ``t^2``."""
    return _F(b - c, t) - _F(b - d, t) - _F(a - c, t) + _F(a - d, t)


def interval_overlap_dt(a, b, c, d, t: float) -> np.ndarray:
    return _dF_dt(b - c, t) - _dF_dt(b - d, t) - _dF_dt(a - c, t) + _dF_dt(a - d, t)


def _interval_zero(a, b, c, d) -> np.ndarray:
    return np.maximum(np.minimum(b, d) - np.maximum(a, c), 0.0)


def self_overlap_deficit(L, t: float):
    """``L - int_0^L int_0^L G``, evaluated without cancellation."""
    L = np.asarray(L, dtype=float)
    return (2.0 * t / _SQRT_PI) * -np.expm1(-L * L / (4.0 * t * t)) + L * erfc(L / (2.0 * t))


def _box_bounds(s: Shape) -> tuple[np.ndarray, np.ndarray]:
    return np.array(s.params[0]) + s.t, np.array(s.params[1]) + s.t


def _box_pair(si: Shape, sj: Shape, t: float) -> tuple[float, float, float]:
    """(H_ij(0), deficit, d deficit / dt) for two axis boxes."""
    a, b = _box_bounds(si)
    c, d = _box_bounds(sj)
    zero = _interval_zero(a, b, c, d)
    h0 = float(np.prod(zero))
    if si == sj:
        L = b - a
        delta = self_overlap_deficit(L, t)
        eps = delta / L
        # prod L - prod (L - delta) without cancellation
        deficit = float(h0 * -np.expm1(np.sum(np.log1p(-eps))))
    else:
        deficit = h0 - float(np.prod(interval_overlap(a, b, c, d, t)))
    I = interval_overlap(a, b, c, d, t)
    dI = interval_overlap_dt(a, b, c, d, t)
    dH = 0.0
    for k in range(len(I)):
        dH += float(dI[k] * np.prod(np.delete(I, k)))
    return h0, deficit, -dH  # d deficit / dt = -dH/dt


# ---------------------------------------------------------------------------
# planar quadrature for general pairs


def _lens_area(r1: float, r2: float, dist):
    dist = np.asarray(dist, dtype=float)
    out = np.zeros_like(dist)
    small, big = min(r1, r2), max(r1, r2)
    inside = dist <= big - small
    out[inside] = math.pi * small * small
    part = (~inside) & (dist < r1 + r2)
    dd = dist[part]
    a1 = np.clip((dd * dd + r1 * r1 - r2 * r2) / (2 * dd * r1), -1, 1)
    a2 = np.clip((dd * dd + r2 * r2 - r1 * r1) / (2 * dd * r2), -1, 1)
    k = (-dd + r1 + r2) * (dd + r1 - r2) * (dd - r1 + r2) * (dd + r1 + r2)
    out[part] = r1 * r1 * np.arccos(a1) + r2 * r2 * np.arccos(a2) - 0.5 * np.sqrt(np.maximum(k, 0.0))
    return out


def _overlap_fn(si: Shape, sj: Shape):
    """``s -> |S_i cap (S_j + s)|`` for an array of shifts ``s`` with shape (n, 2)."""
    if si.kind == BALL and sj.kind == BALL:
        ci, ri = si.bounding_ball
        cj, rj = sj.bounding_ball

        def f(s):
            return _lens_area(ri, rj, np.linalg.norm(cj + s - ci, axis=-1))

        return f

    def f(s):
        return np.array([overlap_area(si, sj.translated(x)) for x in s])

    return f


def _edge_angles(s: Shape) -> list[float]:
    if s.kind == BALL:
        return []
    v = s.world_vertices
    e = np.roll(v, -1, axis=0) - v
    return [float(math.atan2(y, x)) for x, y in e]


def _angle_breaks(si: Shape, sj: Shape) -> np.ndarray:
    angles = [0.0]
    for a in _edge_angles(si) + _edge_angles(sj):
        angles += [a % (2 * math.pi), (a + math.pi) % (2 * math.pi)]
    br = np.unique(np.round(np.array(angles), 14))
    return np.concatenate([br, [br[0] + 2 * math.pi]])


def _polar_deficit(si: Shape, sj: Shape, t: float, n_r: int, n_th: int) -> float:
    f = _overlap_fn(si, sj)
    a0 = float(f(np.zeros((1, 2)))[0])
    rho_max = 2.0 * t * _GAUSS_CUT
    xr, wr = legendre.leggauss(n_r)
    rho = 0.5 * rho_max * (xr + 1.0)
    wrho = 0.5 * rho_max * wr
    xt, wt = legendre.leggauss(n_th)
    br = _angle_breaks(si, sj)
    thetas, wths = [], []
    for lo, hi in zip(br[:-1], br[1:]):
        if hi - lo < 1e-14:
            continue
        thetas.append(0.5 * (hi + lo) + 0.5 * (hi - lo) * xt)
        wths.append(0.5 * (hi - lo) * wt)
    th = np.concatenate(thetas)
    wth = np.concatenate(wths)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    shifts = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    vals = (a0 - f(shifts)).reshape(len(rho), len(th))
    kernel = np.exp(-rho * rho / (4 * t * t)) / (4 * math.pi * t * t) * rho
    return float((kernel * wrho) @ vals @ wth)


def _general_pair(si: Shape, sj: Shape, t: float, tol: float = HEAT_TOL) -> tuple[float, float, float]:
    if si.dim != 2:
        raise ValidationError("heat content beyond axis boxes is implemented for d = 2")
    ci, ri = si.bounding_ball
    cj, rj = sj.bounding_ball
    h0 = overlap_area(si, sj)
    if float(np.linalg.norm(ci - cj)) > ri + rj + 2.0 * t * _GAUSS_CUT:
        return h0, 0.0, 0.0
    n_r, n_th = 16, 8
    prev = _polar_deficit(si, sj, t, n_r, n_th)
    for _ in range(4):
        n_r, n_th = 2 * n_r, 2 * n_th
        cur = _polar_deficit(si, sj, t, n_r, n_th)
        if abs(cur - prev) <= tol * max(abs(cur), h0 * 1e-6, 1e-300):
            return h0, cur, math.nan
        prev = cur
    raise QuadratureError(f"polar heat quadrature did not settle (change {abs(cur - prev):.3g})")


def _pairs(u: BVFunction, v: BVFunction):
    for wi, si in u.terms:
        for wj, sj in v.terms:
            yield wi * wj, si, sj


def _is_box(s: Shape) -> bool:
    return s.kind == BOX and s.axis_aligned


def _pair_terms(si: Shape, sj: Shape, t: float):
    if _is_box(si) and _is_box(sj):
        return _box_pair(si, sj, t), "closed_form"
    return _general_pair(si, sj, t), "quadrature"


@dataclass(frozen=True)
class HeatValue:
    H0: float
    H: float
    deficit: float
    dH: float  # exact derivative when every pair has a closed form, else nan
    method: str
    err: float


def heat_evaluate(u: BVFunction, v: BVFunction | None, t: float) -> HeatValue:
    if not t > 0:
        raise ValidationError("t must be positive")
    v = u if v is None else v
    if u.dim != v.dim:
        raise ValidationError("dimension mismatch")
    h0 = []
    deficit = []
    dH = []
    methods = set()
    for w, si, sj in _pairs(u, v):
        (a, b, c), m = _pair_terms(si, sj, t)  # c is d deficit / dt
        h0.append(w * a)
        deficit.append(w * b)
        dH.append(-w * c)
        methods.add(m)
    H0 = math.fsum(h0)
    D = math.fsum(deficit)
    method = "closed_form" if methods <= {"closed_form"} else "quadrature"
    err = 1e-15 * max(abs(H0), 1.0) if method == "closed_form" else HEAT_TOL * max(abs(D), 1e-300)
    return HeatValue(H0, H0 - D, D, math.fsum(dH) if method == "closed_form" else math.nan, method, err)


def heat_content(u: BVFunction, v: BVFunction | None, t: float) -> float:
    """``H(t) = int (T(t^2) u) v``."""
    return heat_evaluate(u, v, t).H


@dataclass(frozen=True)
class HeatContentCurve:
    t: np.ndarray
    H: np.ndarray
    H0: float
    method: tuple[str, ...]
    err: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "H", "method", "err"])
        for t, h, m, e in zip(self.t, self.H, self.method, self.err):
            w.writerow([repr(float(t)), repr(float(h)), m, repr(float(e))])
        return buf.getvalue()


def heat_curve(u: BVFunction, v: BVFunction | None, t_grid) -> HeatContentCurve:
    t_grid = np.sort(np.asarray(t_grid, dtype=float))[::-1]
    vals = pmap(lambda t: heat_evaluate(u, v, float(t)), t_grid)
    return HeatContentCurve(
        t_grid,
        np.array([x.H for x in vals]),
        vals[0].H0 if vals else 0.0,
        tuple(x.method for x in vals),
        np.array([x.err for x in vals]),
    )


def _richardson(t: np.ndarray, e: np.ndarray) -> np.ndarray:
    """First-order Richardson values from consecutive grid pairs."""
    return (t[:-1] * e[1:] - t[1:] * e[:-1]) / (t[:-1] - t[1:])


def heat_jump_estimate(u: BVFunction, v: BVFunction | None = None, t_grid=None) -> AsymptoteEstimate:
    """``sqrt(pi) (H(0) - H(t)) / t`` on a grid toward 0, with Richardson extrapolation."""
    t_grid = np.asarray(t_grid if t_grid is not None else 1e-2 * 2.0 ** -np.arange(5), dtype=float)
    t_grid = np.sort(t_grid)[::-1]
    if np.any(t_grid <= 0):
        raise ValidationError("t values must be positive")
    vals = pmap(lambda t: heat_evaluate(u, v, float(t)), t_grid)
    E = np.array([_SQRT_PI * x.deficit / t for x, t in zip(vals, t_grid)])
    if len(t_grid) >= 2:
        rich = _richardson(t_grid, E)
        limit = float(rich[-1])
        unc = float(abs(rich[-1] - rich[-2])) if len(rich) >= 2 else float(abs(limit - E[-1]))
    else:
        rich = np.array([])
        limit, unc = float(E[0]), math.nan
    return AsymptoteEstimate(
        "heat",
        t_grid,
        E,
        limit,
        unc,
        {"richardson": [float(x) for x in rich], "raw_last": float(E[-1])},
    )


def heat_derivative(u: BVFunction, v: BVFunction | None, t: float, rel_step: float = 1e-4) -> float:
    """``H'(t)`` by a central difference with step ``t * rel_step``."""
    h = t * rel_step
    up = heat_evaluate(u, v, t + h)
    dn = heat_evaluate(u, v, t - h)
    # difference of deficits keeps the small quantity accurate
    return -(up.deficit - dn.deficit) / (2.0 * h)


def heat_derivative_exact(u: BVFunction, v: BVFunction | None, t: float) -> float:
    """Closed-form ``H'(t)`` for axis-box functions (nan otherwise)."""
    return heat_evaluate(u, v, t).dH


def relative_heat_content_set(shape: Shape, t: float) -> float:
    """``(1/t) int_{Omega^c} T(t^2) 1_Omega = (|Omega| - H(t)) / t``."""
    u = BVFunction.indicator(shape)
    return heat_evaluate(u, u, t).deficit / t


__all__ = [
    "interval_overlap",
    "self_overlap_deficit",
    "HeatValue",
    "heat_evaluate",
    "heat_content",
    "HeatContentCurve",
    "heat_curve",
    "heat_jump_estimate",
    "heat_derivative",
    "heat_derivative_exact",
    "relative_heat_content_set",
]
