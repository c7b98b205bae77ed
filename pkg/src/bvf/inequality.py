"""Translation-energy bounds and a non-sharp isoperimetric inequality.

Explicit constants
------------------
For ``h > 0`` and a unit vector ``v``, Plancherel gives

    int |u(x + h v) - u(x)|^2 dx = int 2 (1 - cos(2 pi h <xi, v>)) |u^(xi)|^2 dxi,

and the left side is at most ``2 h ||u||_inf |D_v u|``.  Since
``(1 - cos t) / t^2`` decreases on ``[0, pi]``, every ``|t| <= 1`` satisfies
``2 (1 - cos t) >= 2 (1 - cos 1) t^2``.  With ``t = 2 pi h <xi, v>`` and
``|xi| <= 1 / (2 pi h)`` this is ``c h^2 <xi, v>^2`` with
``c = 8 pi^2 (1 - cos 1)``.  Putting ``R = 1 / (2 pi h)`` gives

    R^{-1} int_{B_R} <xi, v>^2 |u^|^2 <= C_dir ||u||_inf |D_v u|,
    C_dir = 4 pi / c = 1 / (2 pi (1 - cos 1)).

Integrating over ``v`` in ``S^{d-1}`` uses ``int <xi, v>^2 dsigma = |xi|^2 |S^{d-1}| / d``
and ``int |D_v u| dsigma = |Du| int |v_1| dsigma``, so

    R^{-1} int_{B_R} |xi|^2 |u^|^2 <= C_avg ||u||_inf |Du|,
    C_avg = C_dir d int|v_1| dsigma / |S^{d-1}|     (4 C_dir / pi in the plane).

Integrating by parts against ``r^{-2}`` turns this into the tail bound
``int_{|xi| > R} |u^|^2 <= C_tail ||u||_inf |Du| / R`` with ``C_tail = 2 C_avg``.
Finally ``|u^| <= ||u||_1`` on ``B_R`` and optimizing
``omega_d R^d ||u||_1^2 + C_tail ||u||_inf |Du| / R`` over ``R`` yields

    ||u||_2^2 <= C_iso ||u||_1^{2/(d+1)} (||u||_inf |Du|)^{d/(d+1)},
    C_iso = ((d+1)/d) (d omega_d)^{1/(d+1)} C_tail^{d/(d+1)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry.facets import directional_variation, mean_abs_cosine, total_variation
from .geometry.measure import l1_norm, l2_norm_sq, sup_norm
from .geometry.shapes import BVFunction, ball_volume, sphere_area
from .spectral import sampler

COSINE_CONSTANT = 8.0 * math.pi**2 * (1.0 - math.cos(1.0))
C_DIRECTIONAL = 1.0 / (2.0 * math.pi * (1.0 - math.cos(1.0)))
DEFAULT_R_GRID = tuple(np.geomspace(0.25, 64.0, 25))


def averaged_constant(d: int) -> float:
    return C_DIRECTIONAL * d * mean_abs_cosine(d) / sphere_area(d)


def tail_constant(d: int) -> float:
    return 2.0 * averaged_constant(d)


def isoperimetric_constant(d: int) -> float:
    return (d + 1) / d * (d * ball_volume(d)) ** (1.0 / (d + 1)) * tail_constant(d) ** (d / (d + 1))


def constants(d: int) -> dict:
    return {
        "cosine": COSINE_CONSTANT,
        "directional": C_DIRECTIONAL,
        "averaged": averaged_constant(d),
        "tail": tail_constant(d),
        "isoperimetric": isoperimetric_constant(d),
    }


@dataclass(frozen=True)
class BoundCheck:
    lhs: np.ndarray
    R: np.ndarray
    max_lhs: float
    rhs: float
    constant_used: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.max_lhs


@dataclass(frozen=True)
class IsoperimetricCheck:
    lhs: float
    rhs: float
    constant_used: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class _Directional:
    """Source whose transform is ``<xi, v> u^(xi)``."""

    u: BVFunction
    v: tuple

    @property
    def dim(self) -> int:
        return self.u.dim

    @property
    def diam(self) -> float:
        return self.u.diam

    def fourier(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return (xi @ np.asarray(self.v)) * self.u.fourier(xi)


def _unit(v, d: int) -> tuple:
    v = np.asarray(v, dtype=float)
    if v.shape != (d,) or not np.isclose(np.linalg.norm(v), 1.0, atol=1e-12):
        raise ValidationError("direction must be a unit vector of the function's dimension")
    return tuple(float(x) for x in v)


def _grid(R_grid) -> np.ndarray:
    R = np.asarray(DEFAULT_R_GRID if R_grid is None else R_grid, dtype=float)
    if R.ndim != 1 or R.size == 0 or np.any(R <= 0):
        raise ValidationError("R grid must be a nonempty list of positive radii")
    return np.sort(R)


def directional_bound_check(u: BVFunction, v, R_grid=None, tol: float = 1e-9) -> BoundCheck:
    """``max_R R^{-1} int_{B_R} <xi, v>^2 |u^|^2`` against ``C_dir ||u||_inf |D_v u|``."""
    v = _unit(v, u.dim)
    R = _grid(R_grid)
    if u.is_zero:
        lhs = np.zeros_like(R)
    else:
        phi, _ = sampler(_Directional(u, v)).cumulative_many(0.0, R)
        lhs = phi / R
    rhs = C_DIRECTIONAL * sup_norm(u) * directional_variation(u, v)
    top = float(lhs.max())
    return BoundCheck(lhs, R, top, rhs, C_DIRECTIONAL, top <= rhs * (1.0 + tol) + tol)


def averaged_bound_check(u: BVFunction, R_grid=None, tol: float = 1e-9) -> BoundCheck:
    """``max_R R^{-1} int_{B_R} |xi|^2 |u^|^2`` against ``C_avg ||u||_inf |Du|``."""
    R = _grid(R_grid)
    if u.is_zero:
        lhs = np.zeros_like(R)
    else:
        phi, _ = sampler(u).cumulative_many(2.0, R)
        lhs = phi / R
    c = averaged_constant(u.dim)
    rhs = c * sup_norm(u) * total_variation(u)
    top = float(lhs.max())
    return BoundCheck(lhs, R, top, rhs, c, top <= rhs * (1.0 + tol) + tol)


def isoperimetric_check(u: BVFunction, tol: float = 1e-12) -> IsoperimetricCheck:
    """``||u||_2^2 <= C_iso ||u||_1^{2/(d+1)} ||u||_inf^{d/(d+1)} |Du|^{d/(d+1)}``."""
    d = u.dim
    c = isoperimetric_constant(d)
    lhs = l2_norm_sq(u)
    rhs = c * l1_norm(u) ** (2.0 / (d + 1)) * (sup_norm(u) * total_variation(u)) ** (d / (d + 1))
    return IsoperimetricCheck(lhs, rhs, c, lhs <= rhs * (1.0 + tol))
