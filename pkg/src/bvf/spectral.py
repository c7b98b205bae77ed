"""Radial spectral functionals of piecewise-constant functions.

Everything here is built on the shell integral

    S(r) = int_{S^{d-1}} F(r v) dsigma(v),

where ``F = |u^|^2`` or ``F = Re(u^ conj(v^))``.  Since ``F(-xi) = F(xi)`` for
real functions, only a half circle (d = 2) or a hemisphere (d = 3) is sampled.
The angular node count follows the bandwidth ``2 pi r diam``; the radial
integral uses composite Gauss-Lobatto panels, so one set of shell samples
serves every weight ``r^{p+d-1}``, every cutoff radius and the Gaussian
damped integrals.
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy import special as sp

from .errors import InsufficientRange, NegativeTail, QuadratureError, ValidationError
from .geometry.measure import l1_norm, l2_norm_sq
from .geometry.shapes import BVFunction, Shape, sphere_area
from .parallel import pmap

LOBATTO_POINTS = 7
SHELL_TOL = 1e-10
MIN_HALF_NODES = 32


def _lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto nodes and weights on [-1, 1]."""
    coef = np.zeros(n)
    coef[-1] = 1.0
    interior = legendre.legroots(legendre.legder(coef))
    x = np.concatenate([[-1.0], np.sort(interior), [1.0]])
    w = 2.0 / (n * (n - 1) * legendre.legval(x, coef) ** 2)
    return x, w


_LOB_X, _LOB_W = _lobatto(LOBATTO_POINTS)


# ---------------------------------------------------------------------------
# spectral sources


@dataclass(frozen=True)
class Mollified:
    """``u * G_eps`` for the Gaussian of standard deviation ``eps`` (a smooth function)."""

    u: BVFunction
    eps: float

    @property
    def dim(self) -> int:
        return self.u.dim

    @property
    def diam(self) -> float:
        return self.u.diam + 12.0 * self.eps

    def fourier(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        damp = np.exp(-2.0 * math.pi**2 * self.eps**2 * np.sum(xi * xi, axis=-1))
        return self.u.fourier(xi) * damp


def fourier_indicator(shape: Shape, xi) -> np.ndarray:
    """``int_shape e^{-2 pi i xi.x} dx``."""
    return shape.fourier(xi)


def fourier_perimeter_measure(shape, xi) -> np.ndarray:
    """``int_{boundary} e^{-2 pi i xi.x} dH^{d-1}``."""
    return shape.perimeter_fourier(xi)


@dataclass(frozen=True)
class _Integrand:
    u: object
    v: object | None = None

    @property
    def dim(self) -> int:
        return self.u.dim

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        fu = self.u.fourier(xi)
        if self.v is None:
            return fu.real**2 + fu.imag**2
        return (fu * np.conj(self.v.fourier(xi))).real


def _is_zero(src) -> bool:
    return isinstance(src, BVFunction) and src.is_zero


# ---------------------------------------------------------------------------
# angular quadrature


def half_nodes(r: float, diam: float) -> int:
    """Half-circle node count resolving angular frequencies up to ``2 pi r diam``."""
    x = r * diam
    return max(MIN_HALF_NODES, int(math.ceil(math.pi * x + 8.0 * x ** (1.0 / 3.0) + 8.0)))


def shell_directions(d: int, r: float, diam: float, refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions and weights integrating an even function over ``S^{d-1}``."""
    k = half_nodes(r, diam) * refine
    if d == 2:
        theta = np.pi * np.arange(k) / k
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return dirs, np.full(k, 2.0 * np.pi / k)
    if d == 3:
        n_pol = max(16, int(math.ceil(k / 2)) + 4)
        n_az = 2 * k
        x, w = legendre.leggauss(n_pol)
        mu = 0.5 * (x + 1.0)  # cos(polar angle) in (0, 1)
        wmu = 0.5 * w
        phi = 2.0 * np.pi * np.arange(n_az) / n_az
        s = np.sqrt(1.0 - mu * mu)
        dirs = np.stack(
            [np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)), np.repeat(mu[:, None], n_az, axis=1)], axis=-1
        ).reshape(-1, 3)
        wts = (2.0 * np.outer(wmu, np.full(n_az, 2.0 * np.pi / n_az))).ravel()
        return dirs, wts
    raise ValidationError("shell quadrature is implemented for d = 2, 3")


def _shell_sums(f, d: int, radii: np.ndarray, diam: float, refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
    dirs, w = shell_directions(d, float(radii.max()), diam, refine)
    vals = f(radii[:, None, None] * dirs[None, :, :])
    return vals @ w, np.abs(vals) @ w


def shell_integral(f, d: int, r: float, diam: float, tol: float = SHELL_TOL) -> tuple[float, float]:
    """``int_{S^{d-1}} f(r v) dsigma`` with a doubling error estimate."""
    radii = np.array([float(r)])
    q1, a1 = _shell_sums(f, d, radii, diam, 1)
    for refine in (2, 4):
        q2, a2 = _shell_sums(f, d, radii, diam, refine)
        err = abs(q2[0] - q1[0])
        if err <= tol * max(a2[0], 1e-300):
            return float(q2[0]), float(err)
        q1 = q2
    raise QuadratureError(f"shell integral at r={r:g} did not converge (change {err:.3g})")


def shell_energy(u, r: float, p: float = 2.0, tol: float = SHELL_TOL) -> tuple[float, float]:
    """``g_p(r) = r^{p+d-1} int_{S^{d-1}} |u^(r v)|^2 dsigma`` and its error estimate."""
    if not r > 0:
        raise ValidationError("shell radius must be positive")
    if _is_zero(u):
        return 0.0, 0.0
    scale = r ** (p + u.dim - 1)
    val, err = shell_integral(_Integrand(u), u.dim, r, u.diam, tol)
    return scale * val, scale * err


# ---------------------------------------------------------------------------
# radial sampler


@dataclass(frozen=True)
class SpectralProfile:
    """Samples of ``g_p`` and ``Phi_p`` at the panel edges of a radial grid."""

    p: float
    d: int
    r: np.ndarray
    g: np.ndarray
    Phi: np.ndarray
    err: np.ndarray

    def to_csv(self) -> str:
        return _csv(["r", "g_p", "Phi_p", "err"], [self.r, self.g, self.Phi, self.err])


class RadialSampler:
    """Shell integrals of one integrand on composite Lobatto panels ``[0, R]``.

    Panels have width ``<= min(0.25, 0.5 / diam)``.  Each panel uses a single
    angular rule sized for its outer radius; its outer node is re-evaluated
    with twice the nodes to estimate the angular error.
    """

    def __init__(self, source_u, source_v=None, diam: float | None = None, tol: float = SHELL_TOL):
        self.f = _Integrand(source_u, source_v)
        self.d = source_u.dim
        if diam is None:
            diam = source_u.diam if source_v is None else max(source_u.diam, source_v.diam, _joint_diam(source_u, source_v))
        self.diam = float(diam)
        self.zero = _is_zero(source_u) or (source_v is not None and _is_zero(source_v))
        self.radial = _is_radial(source_u, source_v)
        self.tol = tol
        self.width = min(0.25, 0.5 / self.diam) if self.diam > 0 else 0.25
        self.edges = np.zeros(1)
        self.nodes = np.zeros((0, LOBATTO_POINTS))
        self.S = np.zeros((0, LOBATTO_POINTS))
        self.err = np.zeros(0)
        self._lock = threading.Lock()

    def _panel(self, ab: tuple[float, float]) -> tuple[np.ndarray, np.ndarray, float]:
        a, b = ab
        radii = 0.5 * (a + b) + 0.5 * (b - a) * _LOB_X
        if self.zero:
            return radii, np.zeros_like(radii), 0.0
        if self.radial:
            e1 = np.zeros(self.d)
            e1[0] = 1.0
            return radii, sphere_area(self.d) * self.f(radii[:, None] * e1), 0.0
        for refine in (1, 2, 4):
            s, _ = _shell_sums(self.f, self.d, radii, self.diam, refine)
            s2, a2 = _shell_sums(self.f, self.d, radii[-1:], self.diam, 2 * refine)
            err = abs(s2[0] - s[-1])
            if err <= self.tol * max(a2[0], 1e-300):
                return radii, s, err
        raise QuadratureError(f"angular quadrature did not converge on panel [{a:g}, {b:g}]")

    def extend(self, R: float) -> None:
        with self._lock:
            if self.edges[-1] >= R - 1e-12:
                return
            start = self.edges[-1]
            n = int(math.ceil((R - start) / self.width - 1e-9))
            new_edges = np.linspace(start, R, n + 1) if n > 0 else np.array([start, R])
            n = len(new_edges) - 1
            panels = list(zip(new_edges[:-1], new_edges[1:]))
            out = pmap(self._panel, panels)
            self.nodes = np.vstack([self.nodes, np.array([o[0] for o in out])])
            self.S = np.vstack([self.S, np.array([o[1] for o in out])])
            self.err = np.concatenate([self.err, [o[2] for o in out]])
            self.edges = np.concatenate([self.edges, new_edges[1:]])

    def panel_integrals(self, weight) -> np.ndarray:
        """``int_panel weight(r) S(r) dr`` for every panel."""
        half = 0.5 * np.diff(self.edges)
        return (weight(self.nodes) * self.S) @ _LOB_W * half

    def panel_errors(self, weight) -> np.ndarray:
        half = 0.5 * np.diff(self.edges)
        wmax = np.max(np.abs(weight(self.nodes)), axis=1)
        return wmax * self.err * 2.0 * half

    def profile(self, p: float, R: float | None = None) -> SpectralProfile:
        if R is not None:
            self.extend(R)
        d = self.d
        weight = lambda r: r ** (p + d - 1)
        cum = np.concatenate([[0.0], np.cumsum(self.panel_integrals(weight))])
        cerr = np.concatenate([[0.0], np.cumsum(self.panel_errors(weight))])
        g_edges = np.concatenate([[self.S[0, 0] * weight(self.edges[:1])[0] if len(self.S) else 0.0], self.S[:, -1] * weight(self.edges[1:])])
        return SpectralProfile(p, d, self.edges.copy(), g_edges, cum, cerr)

    def cumulative(self, p: float, R: float) -> tuple[float, float]:
        """``Phi_p(R)`` at an arbitrary radius, with a partial panel if needed."""
        self.extend(R)
        d = self.d
        weight = lambda r: r ** (p + d - 1)
        k = int(np.searchsorted(self.edges, R, side="right")) - 1
        k = min(k, len(self.edges) - 1)
        ints = self.panel_integrals(weight)[:k]
        errs = self.panel_errors(weight)[:k]
        total, err = math.fsum(ints), float(np.sum(errs))
        a = self.edges[k]
        if R - a > 1e-12 and not self.zero:
            radii, s, e = self._panel((a, R))
            total += float(weight(radii) * s @ _LOB_W) * 0.5 * (R - a)
            err += float(np.max(weight(radii)) * e * (R - a))
        return total, err


    def cumulative_many(self, p: float, radii) -> tuple[np.ndarray, np.ndarray]:
        """``Phi_p`` at many radii, sharing the full panels below each radius."""
        radii = np.asarray(radii, dtype=float)
        if radii.size == 0:
            return np.zeros(0), np.zeros(0)
        self.extend(float(radii.max()))
        d = self.d
        weight = lambda r: r ** (p + d - 1)
        cum = np.concatenate([[0.0], np.cumsum(self.panel_integrals(weight))])
        cerr = np.concatenate([[0.0], np.cumsum(self.panel_errors(weight))])
        out = np.empty_like(radii)
        err = np.empty_like(radii)
        for i, R in enumerate(radii):
            k = min(int(np.searchsorted(self.edges, R, side="right")) - 1, len(self.edges) - 1)
            a = self.edges[k]
            val, e = cum[k], cerr[k]
            if R - a > 1e-12 and not self.zero:
                rr, s, pe = self._panel((a, R))
                val += float(weight(rr) * s @ _LOB_W) * 0.5 * (R - a)
                e += float(np.max(weight(rr)) * pe * (R - a))
            out[i], err[i] = val, e
        return out, err


def _ball_terms(src):
    if isinstance(src, Mollified):
        src = src.u
    if not isinstance(src, BVFunction) or src.is_zero:
        return None
    if any(s.kind != "ball" for s in src.shapes):
        return None
    return [s.bounding_ball[0] for s in src.shapes]


def _is_radial(u, v) -> bool:
    """True when ``F(xi)`` depends on ``|xi|`` only: concentric balls (one ball may sit anywhere)."""
    cu = _ball_terms(u)
    if cu is None:
        return False
    if v is None:
        return len(cu) == 1 or all(np.allclose(c, cu[0]) for c in cu)
    cv = _ball_terms(v)
    if cv is None:
        return False
    return all(np.allclose(c, cu[0]) for c in cu + cv)


def _joint_diam(u, v) -> float:
    if isinstance(u, BVFunction) and isinstance(v, BVFunction):
        return (u + v).diam if not (u.is_zero and v.is_zero) else 0.0
    return u.diam + v.diam


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def sampler(u, v=None, diam: float | None = None) -> RadialSampler:
    """Cached :class:`RadialSampler` for ``(u, v, diam)``."""
    key = (u, v, diam)
    with _CACHE_LOCK:
        s = _CACHE.get(key)
        if s is None:
            if len(_CACHE) > 64:
                _CACHE.clear()
            s = RadialSampler(u, v, diam)
            _CACHE[key] = s
    return s


def cutoff_functional(u, R: float, p: float = 2.0, diam: float | None = None) -> float:
    """``Phi_p(R) = int_{B_R} |xi|^p |u^|^2 dxi``."""
    if R < 0:
        raise ValidationError("cutoff radius must be nonnegative")
    if R == 0:
        return 0.0
    return sampler(u, None, diam).cumulative(p, R)[0]


def spectral_profile(u, R: float, p: float = 2.0, v=None, diam: float | None = None) -> SpectralProfile:
    return sampler(u, v, diam).profile(p, R)


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class AsymptoteEstimate:
    kind: str
    params: np.ndarray
    estimates: np.ndarray
    limit: float
    uncertainty: float
    diagnostics: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        unc = np.full(self.params.shape, self.uncertainty)
        return _csv(["param", "estimate", "uncertainty"], [self.params, self.estimates, unc])


def _csv(header, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _decade_average(R: np.ndarray, E: np.ndarray, R_max: float) -> tuple[float, float, np.ndarray]:
    mask = R >= R_max / 10.0 - 1e-12
    vals = E[mask]
    # trapezoid average in R over the last decade
    rr = R[mask]
    mean = float(np.trapezoid(vals, rr) / (rr[-1] - rr[0])) if len(rr) > 1 else float(vals[0])
    spread = float(np.max(vals) - np.min(vals)) if len(vals) else 0.0
    return mean, spread, mask


def jump_estimate_cutoff(u, v=None, R_max: float = 500.0, diam: float | None = None) -> AsymptoteEstimate:
    """``(2 pi^2 / R) int_{B_R} |xi|^2 Re(u^ conj(v^)) dxi`` and its decade average.

    With ``v=None`` the diagonal case ``u = v`` is computed.
    """
    if not R_max > 0:
        raise ValidationError("R_max must be positive")
    prof = sampler(u, v, diam).profile(2.0, R_max)
    R = prof.r[1:]
    E = 2.0 * math.pi**2 * prof.Phi[1:] / R
    limit, spread, mask = _decade_average(R, E, R_max)
    return AsymptoteEstimate(
        "cutoff",
        R,
        E,
        limit,
        0.5 * spread,
        {"window": [R_max / 10.0, R_max], "quadrature_error": float(2 * math.pi**2 * prof.err[-1] / R[-1])},
    )


def _gaussian_value(s: RadialSampler, t: float, u_l1: float) -> tuple[float, float]:
    d = s.d
    beta = 4.0 * math.pi**2 * t * t
    r_cut = math.sqrt(math.log(1e16) / beta)
    s.extend(r_cut)
    k = int(np.searchsorted(s.edges, r_cut, side="left"))
    weight = lambda r: r ** (d + 1) * np.exp(-beta * r * r)
    ints = s.panel_integrals(weight)[:k]
    errs = s.panel_errors(weight)[:k]
    R_end = s.edges[k]
    # |u^| <= ||u||_1 bounds the truncated remainder
    a = (d + 2) / 2.0
    tail = 0.5 * sphere_area(d) * u_l1**2 * beta ** (-a) * sp.gamma(a) * sp.gammaincc(a, beta * R_end**2)
    pref = 8.0 * math.pi**2.5 * t
    return pref * math.fsum(ints), pref * (float(np.sum(errs)) + tail)


def jump_estimate_gaussian(
    u, t_grid=None, v=None, diam: float | None = None
) -> AsymptoteEstimate:
    """``8 pi^{5/2} t int |xi|^2 e^{-4 pi^2 |xi|^2 t^2} |u^|^2 dxi`` on a t grid, extrapolated to 0."""
    t_grid = np.asarray(t_grid if t_grid is not None else 1e-2 * 2.0 ** -np.arange(4), dtype=float)
    if np.any(t_grid <= 0):
        raise ValidationError("t values must be positive")
    order = np.argsort(-t_grid)
    t_grid = t_grid[order]
    s = sampler(u, v, diam)
    if s.zero:
        z = np.zeros_like(t_grid)
        return AsymptoteEstimate("gaussian", t_grid, z, 0.0, 0.0, {"slope": 0.0})
    l1 = _l1_bound(u) * (_l1_bound(v) if v is not None else _l1_bound(u))
    vals = []
    errs = []
    for t in t_grid:
        g, e = _gaussian_value(s, float(t), math.sqrt(l1))
        vals.append(g)
        errs.append(e)
    vals = np.array(vals)
    if len(t_grid) >= 2:
        slope, intercept = np.polyfit(t_grid, vals, 1)
        resid = vals - (intercept + slope * t_grid)
        unc = float(np.max(np.abs(resid))) + float(max(errs))
    else:
        slope, intercept, unc = 0.0, float(vals[0]), float(errs[0])
    return AsymptoteEstimate(
        "gaussian",
        t_grid,
        vals,
        float(intercept),
        unc,
        {"slope": float(slope), "quadrature_error": [float(e) for e in errs]},
    )


def _l1_bound(u) -> float:
    if isinstance(u, Mollified):
        u = u.u
    if isinstance(u, BVFunction):
        if u.is_zero:
            return 0.0
        try:
            return l1_norm(u)
        except Exception:
            return float(sum(abs(w) * s.volume for w, s in u.terms))
    raise ValidationError("unsupported spectral source")


def tail_energy(u, R: float, norm_sq: float | None = None, tol: float = 1e-9) -> float:
    """``||u||_2^2 - Phi_0(R)``, the energy outside ``B_R``."""
    if R < 0:
        raise ValidationError("R must be nonnegative")
    total = l2_norm_sq(u) if norm_sq is None else norm_sq
    if R == 0:
        return total
    phi, err = sampler(u).cumulative(0.0, R)
    tail = total - phi
    if tail < -(err + tol * max(total, 1e-300)):
        raise NegativeTail(f"tail {tail:.3g} is negative beyond tolerance at R={R:g}")
    return max(tail, 0.0)


def tail_asymptote(u, R_max: float = 500.0, R_min: float | None = None) -> AsymptoteEstimate:
    """``2 pi^2 R (||u||_2^2 - Phi_0(R))`` along the panel edges, averaged over ``[R_min, R_max]``."""
    if not R_max > 0:
        raise ValidationError("R_max must be positive")
    R_min = R_max / 2.0 if R_min is None else float(R_min)
    if not 0 < R_min < R_max:
        raise ValidationError("R_min must lie in (0, R_max)")
    total = l2_norm_sq(u) if not _is_zero(u) else 0.0
    prof = sampler(u).profile(0.0, R_max)
    R = prof.r[1:]
    tail = total - prof.Phi[1:]
    floor = prof.err[1:] + 1e-9 * max(total, 1e-300)
    if np.any(tail < -floor):
        raise NegativeTail("tail energy negative beyond quadrature tolerance")
    tail = np.maximum(tail, 0.0)
    A = 2.0 * math.pi**2 * R * tail
    mask = R >= R_min - 1e-12
    rr, aa = R[mask], A[mask]
    limit = float(np.trapezoid(aa, rr) / (rr[-1] - rr[0])) if len(rr) > 1 else float(aa[0])
    return AsymptoteEstimate("tail", R, A, limit, 0.5 * float(np.ptp(aa)), {"window": [R_min, R_max]})


@dataclass(frozen=True)
class PerimeterDiagnostic:
    bounded: bool
    sup_value: float
    argsup: float
    slope: float
    heuristic: bool = True


def finite_perimeter_diagnostic(u, R_grid, slope_tol: float = 0.05) -> PerimeterDiagnostic:
    """Empirical boundedness of ``Phi_2(R) / R`` over a grid spanning two decades or more."""
    R_grid = np.sort(np.asarray(R_grid, dtype=float))
    if R_grid[0] <= 0 or R_grid[-1] / R_grid[0] < 100.0 * (1 - 1e-12):
        raise InsufficientRange("the R grid must span at least two decades")
    s = sampler(u)
    s.extend(float(R_grid[-1]))
    vals = np.array([s.cumulative(2.0, float(R))[0] / R for R in R_grid])
    k = int(np.argmax(vals))
    last = R_grid >= R_grid[-1] / 10.0
    if np.max(vals) <= 0.0:
        return PerimeterDiagnostic(True, 0.0, float(R_grid[0]), 0.0)
    if np.count_nonzero(last) >= 2 and np.all(vals[last] > 0):
        slope = float(np.polyfit(np.log(R_grid[last]), np.log(vals[last]), 1)[0])
    else:
        slope = 0.0
    return PerimeterDiagnostic(bool(slope <= slope_tol), float(vals[k]), float(R_grid[k]), slope)


@dataclass(frozen=True)
class TauberianCheck:
    laplace_limit: float
    growth_limit: float
    ratio: float
    gamma_factor_consistent: bool


def tauberian_crosscheck(profile, gamma: float, lam=None, cumulative=None, rtol: float = 0.05) -> TauberianCheck:
    """Compare ``t^gamma int e^{-t lam} dnu`` with ``Gamma(gamma+1) nu([0,a]) / a^gamma``.

    ``nu`` is the Stieltjes measure of the cumulative profile in the variable
    ``lam = r^2`` (pass ``profile=None`` with explicit ``lam`` and
    ``cumulative`` arrays to check another measure).
    """
    if gamma < 0:
        raise ValidationError("gamma must be nonnegative")
    if profile is not None:
        lam = np.asarray(profile.r, dtype=float) ** 2
        cumulative = np.asarray(profile.Phi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    cum = np.asarray(cumulative, dtype=float)
    pos = lam[lam > 0]
    if len(pos) < 2 or np.log10(pos[-1] / pos[0]) < 2.0:
        raise InsufficientRange("the profile must cover at least two decades")
    a_max = lam[-1]
    # growth: average of nu([0,a]) / a^gamma over the last decade of a
    last = lam >= a_max / 10.0
    growth = float(np.mean(cum[last] / lam[last] ** gamma))
    # laplace: t in a window where the truncation at a_max is negligible
    t_vals = np.geomspace(40.0 / a_max, 400.0 / a_max, 9)
    dnu = np.diff(cum)
    mid = 0.5 * (lam[1:] + lam[:-1])
    lap = []
    for t in t_vals:
        # exact integral of e^{-t lam} against a piecewise-linear cumulative
        a, b = lam[:-1], lam[1:]
        h = b - a
        with np.errstate(invalid="ignore", divide="ignore"):
            avg = np.where(t * h > 1e-8, (np.exp(-t * a) - np.exp(-t * b)) / (t * h), np.exp(-t * mid))
        mass0 = cum[0] if lam[0] <= 0 else cum[0]
        lap.append(t**gamma * (mass0 + math.fsum(avg * dnu)))
    laplace = float(np.mean(lap))
    expected = math.gamma(gamma + 1.0) * growth
    ratio = laplace / expected if expected != 0 else (1.0 if laplace == 0 else math.inf)
    return TauberianCheck(laplace, growth, ratio, bool(abs(ratio - 1.0) <= rtol))


__all__ = [
    "Mollified",
    "fourier_indicator",
    "fourier_perimeter_measure",
    "shell_integral",
    "shell_energy",
    "SpectralProfile",
    "RadialSampler",
    "sampler",
    "spectral_profile",
    "cutoff_functional",
    "AsymptoteEstimate",
    "jump_estimate_cutoff",
    "jump_estimate_gaussian",
    "tail_energy",
    "tail_asymptote",
    "PerimeterDiagnostic",
    "finite_perimeter_diagnostic",
    "TauberianCheck",
    "tauberian_crosscheck",
]
