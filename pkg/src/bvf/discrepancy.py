"""Discrepancy of BV functions on the torus.

For a point set ``P`` of ``N`` points in ``[0, 1)^d`` and a compactly supported
``u`` the discrepancy is

    D(u; P) = sum_{p in P} Pu(p) - N * u^(0),      Pu(x) = sum_n u(x + n).

The quadratic discrepancy ``D_2`` averages ``|D|^2`` over translations on the
torus, dilations ``delta in (0, 1]`` and rotations.  Plancherel on the torus
turns that average into the lattice series

    D_2 = sum_{n != 0} |S(n)|^2 |n|^{-2d-1} Phi_{d+1}(|n|),
    S(n) = sum_p e^{2 pi i p.n},   Phi_{d+1}(R) = int_{|xi|<R} |xi|^{d+1} |u^|^2,

which holds when the rotation group carries the measure whose push-forward
to the sphere is surface measure (total mass ``|S^{d-1}|``).  The Monte-Carlo
estimator samples a probability measure and is rescaled to that mass.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import DegenerateDilation, TailNotControlled, ValidationError, WitnessNotFound
from .geometry.shapes import BOX, BVFunction, ball_volume, sphere_area
from .parallel import pmap, stream
from .spectral import sampler

MC_BLOCK = 4096
Z99 = 2.5758293035489004
DEFAULT_M = (8, 16, 32, 64)
M_CAP = 64
TAIL_TARGET = 0.01
PLATEAU_INFLATION = 2.0
PLATEAU_SLOPE_TOL = 0.25


class TruncationCapped(UserWarning):
    """The Fourier tail bound stayed above target at the largest allowed cutoff."""


# ---------------------------------------------------------------------------
# point sets


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    provenance: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1:
            raise ValidationError("a point set needs at least one point")
        pts = np.mod(pts, 1.0)
        pts[pts >= 1.0] = 0.0
        object.__setattr__(self, "points", pts)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @classmethod
    def explicit(cls, points) -> "PointSet":
        return cls(points, "explicit")

    @classmethod
    def random(cls, N: int, d: int, seed: int) -> "PointSet":
        if N < 1:
            raise ValidationError("N must be positive")
        return cls(stream(seed, 0).random((N, d)), "random", {"seed": int(seed)})

    def translated(self, shift) -> "PointSet":
        return PointSet(self.points + np.asarray(shift, dtype=float), self.provenance, dict(self.params))

    def exp_sum(self, n) -> np.ndarray:
        """``S(n) = sum_p e^{2 pi i p.n}`` for integer vectors ``n`` of shape (..., d)."""
        n = np.asarray(n, dtype=float)
        flat = n.reshape(-1, self.d)
        out = np.empty(flat.shape[0], dtype=complex)
        step = max(1, 2_000_000 // self.N)
        for i in range(0, flat.shape[0], step):
            phase = 2.0 * np.pi * (flat[i : i + step] @ self.points.T)
            out[i : i + step] = np.exp(1j * phase).sum(axis=1)
        return out.reshape(n.shape[:-1])

    def to_dict(self) -> dict:
        return {"d": self.d, "N": self.N, "provenance": self.provenance, "params": self.params,
                "points": self.points.tolist()}


def lattice_pointset(m: int, d: int) -> PointSet:
    """The ``m^d`` points ``k / m`` with ``k in [0, m)^d``."""
    if int(m) != m or m < 1:
        raise ValidationError("lattice side must be a positive integer")
    m = int(m)
    axes = [np.arange(m) / m] * d
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return PointSet(pts, "lattice", {"m": m})


def _iroot(n: int, d: int) -> int:
    r = int(round(n ** (1.0 / d)))
    while r**d > n:
        r -= 1
    while (r + 1) ** d <= n:
        r += 1
    return r


def decomposition_depth(d: int) -> int:
    """Smallest ``K`` with ``((d-1)/d)^K <= (d-1)/(4d)``."""
    if d < 2:
        raise ValidationError("decomposition needs d >= 2")
    K = 0
    # exact rational comparison: (d-1)^K * 4d <= (d-1) * d^K
    while (d - 1) ** K * 4 * d > (d - 1) * d**K:
        K += 1
    return K


@dataclass(frozen=True)
class DecompositionPlan:
    N: int
    d: int
    K: int
    parts: tuple[int, ...]
    remainder: int

    @property
    def sides(self) -> tuple[int, ...]:
        return tuple(_iroot(n, self.d) for n in self.parts)

    def relazione_holds(self) -> bool:
        """``N_{k+1} <= N - sum_{j<=k} N_j <= c2 N_k^{(d-1)/d}`` in exact integers."""
        c2 = 2**self.d - 1
        left = self.N
        for k, nk in enumerate(self.parts):
            left -= nk
            nxt = self.parts[k + 1] if k + 1 < len(self.parts) else 0
            if not (0 <= nxt <= left):
                return False
            if left**self.d > c2**self.d * nk ** (self.d - 1):
                return False
        return left == self.remainder

    def recursione_holds(self, rtol: float = 1e-12) -> bool:
        """``N_{k+1}^{1/d} <= c2^{(k-1)/d} N^{(d-1)^{k-1}/d^k}`` for ``k >= 1``."""
        d, c2 = self.d, 2**self.d - 1
        for k in range(1, len(self.parts)):
            lhs = self.parts[k] ** (1.0 / d)
            rhs = c2 ** ((k - 1) / d) * self.N ** ((d - 1) ** (k - 1) / d**k)
            if lhs > rhs * (1.0 + rtol):
                return False
        return True


def recursive_decomposition(N: int, d: int) -> DecompositionPlan:
    """Greedy split of ``N`` into ``K + 1`` perfect ``d``-th powers plus a remainder."""
    if int(N) != N or N < 1:
        raise ValidationError("N must be a positive integer")
    N = int(N)
    K = decomposition_depth(d)
    parts = []
    left = N
    for _ in range(K + 1):
        nk = _iroot(left, d) ** d
        parts.append(nk)
        left -= nk
    return DecompositionPlan(N, d, K, tuple(parts), left)


def decomposition_arrays(N_max: int, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized plans for every ``N in [1, N_max]``: (N, parts (N, K+1), remainder)."""
    K = decomposition_depth(d)
    N = np.arange(1, N_max + 1, dtype=np.int64)
    left = N.copy()
    parts = np.zeros((N.size, K + 1), dtype=np.int64)
    for k in range(K + 1):
        r = np.floor(np.power(left.astype(float), 1.0 / d)).astype(np.int64)
        r -= (r**d > left).astype(np.int64)
        r += ((r + 1) ** d <= left).astype(np.int64)
        parts[:, k] = r**d
        left = left - parts[:, k]
    return N, parts, left


def check_decomposition_invariants(N_max: int, d: int) -> dict:
    """Check the greedy-split inequalities for every ``N <= N_max`` (integer arithmetic where exact)."""
    N, parts, rem = decomposition_arrays(N_max, d)
    c2 = 2**d - 1
    left = N.copy()
    relazione = np.ones(N.size, dtype=bool)
    for k in range(parts.shape[1]):
        left = left - parts[:, k]
        nxt = parts[:, k + 1] if k + 1 < parts.shape[1] else np.zeros_like(left)
        relazione &= (nxt <= left) & (left >= 0)
        relazione &= _pow_le(left, d, parts[:, k], c2)
    recursione = np.ones(N.size, dtype=bool)
    for k in range(1, parts.shape[1]):
        lhs = parts[:, k] ** (1.0 / d)
        rhs = c2 ** ((k - 1) / d) * N.astype(float) ** ((d - 1) ** (k - 1) / d**k)
        recursione &= lhs <= rhs * (1.0 + 1e-12)
    conservation = bool(np.all(parts.sum(axis=1) + rem == N))
    return {"N_max": N_max, "d": d, "K": parts.shape[1] - 1, "relazione": bool(relazione.all()),
            "recursione": bool(recursione.all()), "conservation": conservation}


def _pow_le(left: np.ndarray, d: int, nk: np.ndarray, c2: int) -> np.ndarray:
    # left^d <= c2^d nk^(d-1); exact in int64 for N <= 10^6 and d <= 3
    if int(left.max(initial=0)) ** d >= 2**62 or c2**d * int(nk.max(initial=0)) ** (d - 1) >= 2**62:
        return np.array([int(a) ** d <= c2**d * int(b) ** (d - 1) for a, b in zip(left, nk)])
    return left**d <= c2**d * nk ** (d - 1)


def composite_pointset(plan: DecompositionPlan, seed: int = 0) -> PointSet:
    """Union of the lattices of each part plus ``N_0`` seeded uniform points (a multiset)."""
    blocks = [lattice_pointset(m, plan.d).points for m, n in zip(plan.sides, plan.parts) if n > 0]
    if plan.remainder:
        blocks.append(stream(seed, 1).random((plan.remainder, plan.d)))
    params = {"N": plan.N, "K": plan.K, "parts": list(plan.parts), "remainder": plan.remainder, "seed": int(seed)}
    if len(blocks) == 1 and plan.remainder == 0:
        return PointSet(blocks[0], "lattice", {"m": plan.sides[0]})
    return PointSet(np.concatenate(blocks), "composite", params)


# ---------------------------------------------------------------------------
# periodization and pointwise discrepancy


def _membership(u: BVFunction, x: np.ndarray) -> np.ndarray:
    """``u(x)`` with boxes taken half-open so that box tilings are exact everywhere."""
    out = np.zeros(x.shape[:-1])
    for w, s in u.terms:
        if s.kind == BOX:
            y = s.to_canonical(x)
            lo, hi = np.array(s.params[0]), np.array(s.params[1])
            out = out + w * np.all((y >= lo) & (y < hi), axis=-1)
        else:
            out = out + w * s.contains(x)
    return out


def _support_ball(u: BVFunction) -> tuple[np.ndarray, float]:
    balls = [s.bounding_ball for s in u.shapes]
    if not balls:
        return np.zeros(u.dim), 0.0
    c = np.mean([b[0] for b in balls], axis=0)
    return c, max(float(np.linalg.norm(b[0] - c)) + b[1] for b in balls)


def _offsets(d: int, reach: int) -> np.ndarray:
    return np.array(list(product(range(-reach, reach + 1), repeat=d)), dtype=float)


def _translates(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Points ``x + n`` for the lattice shifts that can meet the ball ``(center, radius)``."""
    base = -np.round(x - center)
    offs = _offsets(x.shape[-1], int(math.ceil(radius)))
    return x[..., None, :] + base[..., None, :] + offs


def periodize_eval(u: BVFunction, x) -> np.ndarray:
    """``sum_{n in Z^d} u(x + n)`` over the finitely many translates meeting ``supp u``."""
    x = np.asarray(x, dtype=float)
    c, r = _support_ball(u)
    y = _translates(x, c, r)
    vals = _membership(u, y).sum(axis=-1)
    return float(vals) if vals.ndim == 0 else vals


def _rotation_matrix(rho, d: int) -> np.ndarray:
    if rho is None:
        return np.eye(d)
    if np.isscalar(rho):
        if d != 2:
            raise ValidationError("a scalar rotation is an angle in d = 2")
        c, s = math.cos(rho), math.sin(rho)
        return np.array([[c, -s], [s, c]])
    R = np.asarray(rho, dtype=float)
    if R.shape != (d, d) or not np.allclose(R @ R.T, np.eye(d), atol=1e-9) or np.linalg.det(R) < 0:
        raise ValidationError("rotation must be a proper orthogonal matrix")
    return R


def _transformed_sums(u: BVFunction, P: PointSet, tau: np.ndarray, delta: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``sum_p P{g}(p)`` for a batch of ``g(x) = u(R (x - tau) / delta)``.

    ``tau``: (B, d), ``delta``: (B,), ``R``: (B, d, d).
    """
    c, r = _support_ball(u)
    # supp g lies in the ball (tau + delta R^T c, delta r)
    gc = tau + delta[:, None] * np.einsum("bji,j->bi", R, c)
    z = P.points[None, :, :] - gc[:, None, :]  # (B, N, d)
    base = -np.round(z)
    offs = _offsets(P.d, int(math.ceil(r)))
    x = P.points[None, :, None, :] + base[:, :, None, :] + offs  # (B, N, K, d)
    y = np.einsum("bij,bnkj->bnki", R, x - tau[:, None, None, :]) / delta[:, None, None, None]
    return _membership(u, y).sum(axis=(1, 2))


def discrepancy(u: BVFunction, P: PointSet, tau=None, delta: float = 1.0, rho=None) -> float:
    """``D(g; P)`` for ``g(x) = u(rho (x - tau) / delta)``; the mean of ``g`` is ``delta^d u^(0)``."""
    if not delta > 0:
        raise DegenerateDilation("dilation must be positive")
    if delta > 1:
        raise ValidationError("dilation must lie in (0, 1]")
    d = u.dim
    if P.d != d:
        raise ValidationError("point set and function dimensions differ")
    tau = np.zeros(d) if tau is None else np.asarray(tau, dtype=float)
    R = _rotation_matrix(rho, d)
    s = _transformed_sums(u, P, tau[None, :], np.array([float(delta)]), R[None, :, :])[0]
    return float(s - P.N * delta**d * u.mass)


# ---------------------------------------------------------------------------
# exponential sums


@dataclass(frozen=True)
class ExpSumTable:
    """``|S(n)|^2`` on one representative of each ``+-n`` pair with ``0 < |n| <= M``."""

    d: int
    M: float
    vectors: np.ndarray
    S2: np.ndarray
    norm2: np.ndarray

    @property
    def multiplicity(self) -> int:
        return 2

    def grouped(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct ``|n|^2`` keys and the total ``sum |S(n)|^2`` over both signs."""
        keys, inv = np.unique(self.norm2, return_inverse=True)
        return keys, 2.0 * np.bincount(inv, weights=self.S2, minlength=keys.size)

    def full_sum(self) -> float:
        return float(2.0 * self.S2.sum())


def half_lattice(M: float, d: int) -> np.ndarray:
    """Integer vectors with ``0 < |n| <= M`` whose first nonzero coordinate is positive."""
    m = int(math.floor(M))
    axes = [np.arange(-m, m + 1)] * d
    n = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    n = n[np.sum(n * n, axis=1) <= M * M + 1e-9]
    nz = n != 0
    first = np.argmax(nz, axis=1)
    sign = n[np.arange(n.shape[0]), first]
    return n[sign > 0]


def exp_sum_table(P: PointSet, M: float, threads: int | None = None) -> ExpSumTable:
    n = half_lattice(M, P.d)
    chunks = np.array_split(np.arange(n.shape[0]), max(1, min(64, n.shape[0] // 512)))
    parts = pmap(lambda idx: P.exp_sum(n[idx]), chunks, threads)
    S = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    if P.provenance == "lattice":
        # exact annihilation off m Z^d
        m = P.params["m"]
        on = np.all(n % m == 0, axis=1)
        S = np.where(on, float(P.N), 0.0)
    S2 = np.minimum(S.real**2 + S.imag**2, float(P.N) ** 2)
    return ExpSumTable(P.d, float(M), n, S2, np.sum(n * n, axis=1))


# ---------------------------------------------------------------------------
# quadratic discrepancy


@dataclass
class DiscrepancyReport:
    value: float
    method: str
    N: int
    d: int
    truncation: float | None = None
    samples: int | None = None
    tail_bound: float | None = None
    ci_half_width: float | None = None
    partial_sum: float | None = None
    tail_constants: dict = field(default_factory=dict)
    provenance: str = ""
    seed: int | None = None
    warnings: list = field(default_factory=list)

    @property
    def uncertainty(self) -> float:
        if self.method == "fourier_sum":
            return float(self.tail_bound or 0.0)
        return float(self.ci_half_width or 0.0)

    def to_dict(self) -> dict:
        return asdict(self)


def lattice_tail_sum(M: float, d: int) -> float:
    """Upper bound for ``sum_{n in Z^d, |n| > M} |n|^{-d-1}`` by integral comparison.

    Each ``n`` owns the unit cube around it; on that cube ``|n| >= |x| - sqrt(d)/2``,
    and the cubes lie outside ``|x| = M - sqrt(d)/2``.
    """
    c = math.sqrt(d) / 2.0
    a = M - 2.0 * c
    if a <= 0:
        return math.inf
    total = sum(math.comb(d - 1, k) * c ** (d - 1 - k) * a ** (k - d) / (d - k) for k in range(d))
    return sphere_area(d) * total


def _phi(u, radii: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    return sampler(u).cumulative_many(p, radii)


def _plateau(u, M: float, d: int) -> tuple[float, float]:
    """Max of ``Phi_{d+1}(r) / r^d`` over ``[M/2, M]`` and its log-log slope."""
    r = np.linspace(M / 2.0, M, 17)
    phi, _ = _phi(u, r, d + 1)
    ratio = phi / r**d
    if np.all(ratio > 0):
        slope = float(np.polyfit(np.log(r), np.log(ratio), 1)[0])
    else:
        slope = 0.0
    return float(ratio.max()), slope


def tail_constants(u, M: float) -> dict:
    """Profile extrema standing in for ``M(u)`` and ``m(u)`` plus a threshold ``n_0``.

    ``M(u) = max_{1<=r<=M} r^{-d} Phi_{d+1}(r)``; ``m(u)`` is the minimum over
    ``[n_0, M]``, where ``n_0`` is the first integer radius after which the ratio
    stays within a factor 2 of its plateau.
    """
    d = u.dim
    r = np.arange(1, int(math.floor(M)) + 1, dtype=float)
    phi, _ = _phi(u, r, d + 1)
    ratio = phi / r**d
    plateau = float(np.mean(ratio[r >= M / 2.0]))
    good = (ratio >= plateau / 2.0) & (ratio <= 2.0 * plateau)
    bad = np.nonzero(~good)[0]
    n0 = int(r[bad[-1] + 1]) if bad.size and bad[-1] + 1 < r.size else (int(r[0]) if not bad.size else int(M))
    return {"M_u": float(ratio.max()), "m_u": float(ratio[r >= n0].min()), "n0": n0, "plateau": plateau}


def _fourier_sum(u, table: ExpSumTable, scale: float = 1.0) -> float:
    d = table.d
    keys, weight = table.grouped()
    mask = weight > 0
    keys, weight = keys[mask], weight[mask]
    if keys.size == 0:
        return 0.0
    r = np.sqrt(keys.astype(float)) * scale
    phi, _ = _phi(u, r, d + 1)
    return float(np.sum(weight * r ** (-2 * d - 1) * phi))


def quadratic_discrepancy_fourier(
    u: BVFunction, P: PointSet, M: float | None = None, threads: int | None = None
) -> DiscrepancyReport:
    """Truncated lattice series for ``D_2`` with a rigorous tail bound.

    With ``M=None`` the cutoff doubles from 8 until the tail bound is below 1% of
    the partial sum, stopping at 64.  Lattice point sets are summed over the
    reduced index ``k = n / m``, so their cutoff applies to ``|k|``.
    """
    d = u.dim
    if P.d != d:
        raise ValidationError("point set and function dimensions differ")
    grid = DEFAULT_M if M is None else (float(M),)
    notes: list[str] = []
    lattice = P.provenance == "lattice" and P.params.get("m", 1) > 1
    m = P.params.get("m", 1) if lattice else 1
    for Mk in grid:
        if lattice:
            # only n = m k contribute, each with |S|^2 = N^2
            table = ExpSumTable(d, Mk, half_lattice(Mk, d), None, None)
            k = table.vectors
            table = ExpSumTable(d, Mk, k, np.full(k.shape[0], float(P.N) ** 2), np.sum(k * k, axis=1))
            partial = _fourier_sum(u, table, scale=m)
            R_cut = Mk * m
            lat_tail = float(m) ** (-d - 1) * lattice_tail_sum(Mk, d)
        else:
            table = exp_sum_table(P, Mk, threads)
            partial = _fourier_sum(u, table)
            R_cut = Mk
            lat_tail = lattice_tail_sum(Mk, d)
        plateau, slope = _plateau(u, R_cut, d)
        tail = float(P.N) ** 2 * PLATEAU_INFLATION * plateau * lat_tail
        if tail <= TAIL_TARGET * partial:
            break
    if tail > TAIL_TARGET * partial and M is None:
        msg = f"tail bound {tail:.3g} exceeds 1% of the partial sum at the cutoff cap {M_CAP}"
        warnings.warn(msg, TruncationCapped, stacklevel=2)
        notes.append(msg)
    controlled = abs(slope) <= PLATEAU_SLOPE_TOL
    if not controlled:
        msg = f"Phi_(d+1)/r^d has not reached a plateau (log-log slope {slope:.3g}); tail bound omitted"
        warnings.warn(msg, TailNotControlled, stacklevel=2)
        notes.append(msg)
    consts = tail_constants(u, R_cut)
    consts["plateau_slope"] = slope
    return DiscrepancyReport(
        value=partial,
        method="fourier_sum",
        N=P.N,
        d=d,
        truncation=float(Mk),
        tail_bound=tail if controlled else None,
        partial_sum=partial,
        tail_constants=consts,
        provenance=P.provenance,
        seed=P.params.get("seed"),
        warnings=notes,
    )


def _haar(gen: np.random.Generator, B: int, d: int) -> np.ndarray:
    if d == 2:
        a = gen.uniform(0.0, 2.0 * np.pi, B)
        c, s = np.cos(a), np.sin(a)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    if d == 3:
        q = gen.standard_normal((B, 4))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        return Rotation.from_quat(q).as_matrix()
    raise ValidationError("Monte-Carlo discrepancy is implemented for d = 2, 3")


def _mc_block(u: BVFunction, P: PointSet, seed: int, block: int, size: int) -> np.ndarray:
    gen = stream(seed, 7, block)
    d = P.d
    tau = gen.random((size, d))
    delta = 1.0 - gen.random(size)  # uniform on (0, 1]
    R = _haar(gen, size, d)
    # bound the (B, N, K, d) working array
    out = np.empty(size)
    step = max(1, 400_000 // (P.N * (2 * int(math.ceil(_support_ball(u)[1])) + 1) ** d))
    for i in range(0, size, step):
        sl = slice(i, i + step)
        s = _transformed_sums(u, P, tau[sl], delta[sl], R[sl])
        out[sl] = s - P.N * delta[sl] ** d * u.mass
    return out**2


def quadratic_discrepancy_mc(
    u: BVFunction, P: PointSet, samples: int = 100_000, seed: int = 0, threads: int | None = None
) -> DiscrepancyReport:
    """Monte-Carlo ``D_2`` with a 99% normal confidence half-width.

    Samples are drawn in fixed blocks whose streams depend only on ``(seed, block)``;
    the estimate is ``|S^{d-1}|`` times the sample mean of ``|D|^2``.
    """
    d = u.dim
    if P.d != d:
        raise ValidationError("point set and function dimensions differ")
    if samples < 2:
        raise ValidationError("need at least two samples")
    sizes = [MC_BLOCK] * (samples // MC_BLOCK)
    if samples % MC_BLOCK:
        sizes.append(samples % MC_BLOCK)
    vals = pmap(lambda ib: _mc_block(u, P, seed, ib[0], ib[1]), list(enumerate(sizes)), threads)
    x = np.concatenate(vals)
    mass = sphere_area(d)
    mean = mass * float(np.mean(x))
    hw = mass * Z99 * float(np.std(x, ddof=1)) / math.sqrt(x.size)
    return DiscrepancyReport(
        value=mean,
        method="monte_carlo",
        N=P.N,
        d=d,
        samples=int(samples),
        ci_half_width=hw,
        provenance=P.provenance,
        seed=int(seed),
        tail_constants={"rotation_mass": mass},
    )


# ---------------------------------------------------------------------------
# Cassels-Montgomery


@dataclass(frozen=True)
class CMCheck:
    lhs: float
    rhs: float
    holds: bool
    M: float
    N: int


def cassels_montgomery_check(P: PointSet, M: float) -> CMCheck:
    """``sum_{0<|n|<=M} |S(n)|^2 >= 2^{-d} |B_M| N - N^2``."""
    if not M >= 1:
        raise ValidationError("radius must be at least 1")
    n = half_lattice(M, P.d)
    S = P.exp_sum(n)
    lhs = 2.0 * float(np.sum(S.real**2 + S.imag**2))
    rhs = 2.0 ** (-P.d) * ball_volume(P.d) * M**P.d * P.N - float(P.N) ** 2
    return CMCheck(lhs, rhs, lhs >= rhs - 1e-9 * max(1.0, abs(rhs)), float(M), P.N)


@dataclass(frozen=True)
class CMWitness:
    x: np.ndarray
    count: int
    target: float
    coefficients_ok: bool
    nonnegative_ok: bool


def lattice_in_ball(center, radius: float) -> np.ndarray:
    center = np.asarray(center, dtype=float)
    lo = np.floor(center - radius).astype(int)
    hi = np.ceil(center + radius).astype(int)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, center.size)
    return pts[np.sum((pts - center) ** 2, axis=1) <= radius * radius + 1e-12]


def cm_witness(M: float, d: int, resolution: float | None = None, seed: int = 0) -> CMWitness:
    """Grid search for ``x`` with ``#((x + B_{M/2}) cap Z^d) >= 2^{-d} |B_M|``.

    The averaging identity ``int_T #A(x) dx = |B_{M/2}|`` guarantees such a point.
    With ``A`` the lattice points in ``x + B_{M/2}``, the polynomial
    ``T(y) = |sum_{a in A} e^{2 pi i a.y}|^2 / #A`` has coefficients
    ``T^(n) = #{(a, b): a - b = n} / #A`` in ``[0, 1]`` with ``T^(0) = 1``.
    """
    if not M > 0:
        raise ValidationError("radius must be positive")
    h = 1.0 / (4.0 * M) if resolution is None else float(resolution)
    if h > 1.0 / (4.0 * M) + 1e-15:
        raise ValidationError("grid spacing must be at most 1/(4M)")
    target = 2.0 ** (-d) * ball_volume(d) * M**d
    k = int(math.ceil(1.0 / h))
    best, best_x = -1, None
    for idx in product(range(k), repeat=d):
        x = np.array(idx, dtype=float) / k
        c = lattice_in_ball(x, M / 2.0).shape[0]
        if c > best:
            best, best_x = c, x
        if best >= target:
            break
    if best < target:
        raise WitnessNotFound(f"no grid point reaches {target:.4g} lattice points (best {best})")
    A = lattice_in_ball(best_x, M / 2.0)
    diffs = (A[:, None, :] - A[None, :, :]).reshape(-1, d)
    keys, counts = np.unique(diffs, axis=0, return_counts=True)
    coef = counts / A.shape[0]
    zero = np.all(keys == 0, axis=1)
    coefficients_ok = bool(np.isclose(coef[zero][0], 1.0) and np.all(coef >= 0) and np.all(coef <= 1.0 + 1e-12))
    y = stream(seed, 11).random((1000, d))
    T = np.abs(np.exp(2j * np.pi * (y @ A.T)).sum(axis=1)) ** 2 / A.shape[0]
    T_coef = (np.exp(2j * np.pi * (y @ keys.T)) @ coef).real
    nonnegative_ok = bool(np.all(T >= -1e-9) and np.allclose(T, T_coef, atol=1e-8 * A.shape[0]))
    return CMWitness(best_x, int(best), target, coefficients_ok, nonnegative_ok)


# ---------------------------------------------------------------------------
# scaling study


@dataclass(frozen=True)
class ScalingRow:
    N: int
    D2: float
    normalized: float
    tail_bound: float | None
    cutoff: float


@dataclass(frozen=True)
class ScalingStudy:
    construction: str
    d: int
    rows: tuple[ScalingRow, ...]

    @property
    def normalized(self) -> np.ndarray:
        return np.array([r.normalized for r in self.rows])

    def tail_slope(self, last: int = 5) -> float:
        """Log-log slope of the normalized trace against ``N`` over the last points."""
        N = np.array([r.N for r in self.rows[-last:]], dtype=float)
        y = self.normalized[-last:]
        return float(np.polyfit(np.log(N), np.log(y), 1)[0])

    def to_csv(self) -> str:
        lines = ["N,D2,normalized,tail_bound,cutoff"]
        for r in self.rows:
            tb = "" if r.tail_bound is None else repr(r.tail_bound)
            lines.append(f"{r.N},{r.D2!r},{r.normalized!r},{tb},{r.cutoff!r}")
        return "\n".join(lines) + "\n"


def build_pointset(construction: str, N: int, d: int, seed: int = 0) -> PointSet:
    if construction == "lattice":
        m = _iroot(N, d)
        if m**d != N:
            raise ValidationError(f"{N} is not a perfect {d}-th power")
        return lattice_pointset(m, d)
    if construction == "composite":
        return composite_pointset(recursive_decomposition(N, d), seed)
    if construction == "random":
        return PointSet.random(N, d, seed)
    raise ValidationError(f"unknown construction {construction!r}")


def scaling_study(
    u: BVFunction, construction: str, N_list, M: float | None = 64, seed: int = 0
) -> ScalingStudy:
    """``D_2`` and ``N^{(1-d)/d} D_2`` along a list of point-set sizes."""
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValidationError("N list must be increasing")
    d = u.dim
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationCapped)
        for N in N_list:
            rep = quadratic_discrepancy_fourier(u, build_pointset(construction, N, d, seed), M)
            rows.append(ScalingRow(N, rep.value, rep.value * N ** ((1.0 - d) / d), rep.tail_bound, rep.truncation))
    return ScalingStudy(construction, d, tuple(rows))
