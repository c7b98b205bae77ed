"""Verification suites: quick identity checks and the acceptance criteria.

Every check returns a :class:`CheckResult` whose fields are plain numbers, so
a suite serializes to the same bytes on every run with the same seed.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import heat, inequality, minkowski, spectral
from .discrepancy import (
    PointSet,
    TruncationCapped,
    cassels_montgomery_check,
    check_decomposition_invariants,
    cm_witness,
    composite_pointset,
    discrepancy,
    lattice_pointset,
    periodize_eval,
    quadratic_discrepancy_fourier,
    quadratic_discrepancy_mc,
    recursive_decomposition,
    scaling_study,
)
from .geometry.facets import directional_variation, jump_product
from .geometry.measure import make_whisker_disk
from .geometry.shapes import BVFunction, Shape
from .parallel import pmap, stream

SQUARE = BVFunction.indicator(Shape.box((0, 0), (1, 1)))
DISK = BVFunction.indicator(Shape.ball((0, 0), 1.0))
QUARTER_BALL = BVFunction.indicator(Shape.ball((0, 0), 0.25))


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float | None = None
    target: float | None = None
    detail: dict = field(default_factory=dict)
    seconds: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        val = "" if self.value is None else f" value={self.value:.6g}"
        tgt = "" if self.target is None else f" target={self.target:.6g}"
        return f"[{status}] {self.name}{val}{tgt}"

    def to_dict(self, timings: bool = False) -> dict:
        d = {"name": self.name, "passed": bool(self.passed), "value": self.value, "target": self.target,
             "detail": self.detail}
        if timings:
            d["seconds"] = self.seconds
        return d


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# random catalogs


def random_box_union(gen: np.random.Generator, n_terms: int | None = None, step: float = 0.25,
                     extent: int = 8) -> BVFunction:
    """A weighted union of axis boxes with corners on a ``step`` grid inside ``[0, extent*step]^2``."""
    n = int(gen.integers(1, 4)) if n_terms is None else n_terms
    weights = (1.0, -1.0, 0.5, 2.0, -0.5)
    terms = []
    for _ in range(n):
        a = np.sort(gen.choice(extent + 1, size=2, replace=False))
        b = np.sort(gen.choice(extent + 1, size=2, replace=False))
        lo, hi = (a[0] * step, b[0] * step), (a[1] * step, b[1] * step)
        terms.append((weights[int(gen.integers(len(weights)))], Shape.box(lo, hi)))
    return BVFunction.from_terms(terms)


def box_pair_catalog(seed: int = 0, size: int = 10) -> list[tuple[BVFunction, BVFunction, float]]:
    """Box-union pairs whose jump sets overlap: ``|J(u,v)| >= sqrt(J(u,u) J(v,v)) / 4``."""
    out = []
    attempt = 0
    while len(out) < size:
        gen = stream(seed, 101, attempt)
        attempt += 1
        u = random_box_union(gen, extent=6)
        v = random_box_union(gen, extent=6)
        if u.is_zero or v.is_zero:
            continue
        juv = jump_product(u, v).value
        scale = math.sqrt(jump_product(u, u).value * jump_product(v, v).value)
        if scale > 0 and abs(juv) >= 0.25 * scale:
            out.append((u, v, juv))
    return out


def random_catalog(seed: int = 0, size: int = 50) -> list[BVFunction]:
    """Mixed catalog for the inequality sweeps: box unions, some rotated, and disks."""
    out = []
    for i in range(size):
        gen = stream(seed, 202, i)
        kind = i % 5
        if kind == 3:
            r = float(gen.uniform(0.2, 1.0))
            c = gen.uniform(0, 1, 2)
            u = BVFunction.indicator(Shape.ball(c, r)) * float(gen.choice([1.0, 2.0, -1.0]))
        else:
            u = random_box_union(gen)
            if kind == 4:
                u = u.rotated(float(gen.uniform(0, math.pi)))
        if u.is_zero:
            u = SQUARE
        out.append(u)
    return out


# ---------------------------------------------------------------------------
# trivial suite


def _trivial_checks() -> list[tuple[str, callable]]:
    def periodize_tiling():
        xs = stream(0, 1).random((20, 2))
        v = periodize_eval(SQUARE, xs)
        return bool(np.all(v == 1.0)), float(v.mean()), 1.0

    def periodize_membership():
        b = BVFunction.indicator(Shape.ball((0.5, 0.5), 0.25))
        a, c = periodize_eval(b, (0.5, 0.5)), periodize_eval(b, (0.0, 0.0))
        return a == 1.0 and c == 0.0, a, 1.0

    def periodize_double_cover():
        v = periodize_eval(BVFunction.indicator(Shape.box((0, 0), (1.5, 1))), (0.25, 0.5))
        return v == 2.0, v, 2.0

    def tiling_discrepancy():
        D = discrepancy(SQUARE, PointSet.random(7, 2, 3))
        return abs(D) < 1e-12, D, 0.0

    def zero_mean_discrepancy():
        u = BVFunction.indicator(Shape.box((0, 0), (0.5, 0.5))) - 0.25 * SQUARE
        P = PointSet.explicit([[0.1, 0.1], [0.7, 0.2], [0.3, 0.9]])
        D = discrepancy(u, P)
        ref = float(np.sum(periodize_eval(u, P.points)))
        return abs(D - ref) < 1e-12, D, ref

    def single_point_ball():
        b = BVFunction.indicator(Shape.ball((0.5, 0.5), 0.25))
        D = discrepancy(b, PointSet.explicit([[0.5, 0.5]]))
        return abs(D - (1 - math.pi / 16)) < 1e-14, D, 1 - math.pi / 16

    def lattice_m1():
        P = lattice_pointset(1, 2)
        return P.N == 1 and bool(np.all(P.points == 0)), float(P.N), 1.0

    def lattice_exp_sums():
        S = lattice_pointset(2, 2).exp_sum([[1, 0], [2, 0]])
        return abs(S[0]) < 1e-12 and abs(S[1] - 4) < 1e-12, float(abs(S[1])), 4.0

    def decomposition_exact_power():
        plan = recursive_decomposition(4, 2)
        return plan.parts[0] == 4 and sum(plan.parts[1:]) == 0 and plan.remainder == 0, float(plan.parts[0]), 4.0

    def decomposition_conservation():
        gen = stream(0, 2)
        ok = True
        for N in gen.integers(1, 10**6, 1000):
            for d in (2, 3):
                p = recursive_decomposition(int(N), d)
                ok &= sum(p.parts) + p.remainder == N
        return ok, None, None

    def composite_of_power():
        P = composite_pointset(recursive_decomposition(4, 2))
        return bool(np.array_equal(P.points, lattice_pointset(2, 2).points)), float(P.N), 4.0

    def cm_coincident():
        r = cassels_montgomery_check(PointSet.explicit(np.zeros((5, 2))), 3.0)
        return r.holds, r.lhs, r.rhs

    def cm_lattice_gap():
        r = cassels_montgomery_check(lattice_pointset(4, 2), 3.0)
        return r.holds and abs(r.lhs) < 1e-9, r.rhs, math.pi * 9 / 4 * 16 - 256

    def witness_polynomial():
        w = cm_witness(2.0, 2)
        return w.coefficients_ok and w.nonnegative_ok and w.count >= 4, float(w.count), w.target

    def zero_function():
        z = BVFunction.zero(2)
        r = inequality.averaged_bound_check(z)
        return r.holds and r.max_lhs == 0.0 and jump_product(z, SQUARE).value == 0.0, r.max_lhs, 0.0

    def facet_square():
        J = jump_product(SQUARE, SQUARE).value
        return abs(J - 4.0) < 1e-12, J, 4.0

    def directional_square():
        a = directional_variation(SQUARE, (1.0, 0.0))
        b = directional_variation(SQUARE, (math.sqrt(0.5), math.sqrt(0.5)))
        return abs(a - 2) < 1e-12 and abs(b - 2 * math.sqrt(2)) < 1e-12, b, 2 * math.sqrt(2)

    def fourier_at_zero():
        val = complex(DISK.fourier(np.zeros(2)))
        return abs(val - math.pi) < 1e-14, val.real, math.pi

    def heat_mass():
        H = heat.heat_evaluate(SQUARE, SQUARE, 1e-2)
        return abs(H.H0 - 1.0) < 1e-14, H.H0, 1.0

    def isoperimetric_scaling():
        a = inequality.isoperimetric_check(SQUARE)
        b = inequality.isoperimetric_check(SQUARE.scaled(3.0))
        ratio = (b.rhs / b.lhs) / (a.rhs / a.lhs)
        return a.holds == b.holds and abs(ratio - 1) < 1e-12, ratio, 1.0

    return [
        ("periodize: unit-square tiling", periodize_tiling),
        ("periodize: ball membership", periodize_membership),
        ("periodize: double cover", periodize_double_cover),
        ("discrepancy: tiling indicator", tiling_discrepancy),
        ("discrepancy: zero-mean function", zero_mean_discrepancy),
        ("discrepancy: single point in ball", single_point_ball),
        ("lattice: m=1", lattice_m1),
        ("lattice: exponential sums", lattice_exp_sums),
        ("decomposition: exact power", decomposition_exact_power),
        ("decomposition: conservation", decomposition_conservation),
        ("composite: power is a lattice", composite_of_power),
        ("cassels-montgomery: coincident points", cm_coincident),
        ("cassels-montgomery: lattice gap", cm_lattice_gap),
        ("cm-witness: polynomial coefficients", witness_polynomial),
        ("zero function", zero_function),
        ("facets: unit square", facet_square),
        ("facets: directional variation", directional_square),
        ("fourier: mass at zero", fourier_at_zero),
        ("heat: mass at t=0", heat_mass),
        ("isoperimetric: scale invariance", isoperimetric_scaling),
    ]


def trivial_suite(threads: int | None = None) -> list[CheckResult]:
    checks = _trivial_checks()

    def run(item):
        name, fn = item
        ok, value, target = fn()
        return CheckResult(name, bool(ok), None if value is None else float(value),
                           None if target is None else float(target))

    return pmap(run, checks, threads)


# ---------------------------------------------------------------------------
# acceptance criteria


def criterion_1() -> CheckResult:
    sq = spectral.jump_estimate_cutoff(SQUARE, R_max=500.0)
    dk = spectral.jump_estimate_cutoff(DISK, R_max=500.0)
    e1, e2 = _rel(sq.limit, 4.0), _rel(dk.limit, 2 * math.pi)
    return CheckResult("1 weighted Plancherel (cutoff, R_max=500)", e1 <= 0.02 and e2 <= 0.02, sq.limit, 4.0,
                       {"square": sq.limit, "disk": dk.limit, "disk_target": 2 * math.pi,
                        "rel_err_square": e1, "rel_err_disk": e2})


def criterion_2() -> CheckResult:
    v = BVFunction.indicator(Shape.box((1, 0), (2, 1)))
    est = spectral.jump_estimate_cutoff(SQUARE, v, R_max=500.0)
    err = abs(est.limit + 1.0)
    return CheckResult("2 mixed identity (adjacent squares)", err <= 0.05, est.limit, -1.0, {"abs_err": err})


def criterion_3() -> CheckResult:
    est = spectral.tail_asymptote(SQUARE, R_max=500.0, R_min=250.0)
    err = _rel(est.limit, 4.0)
    return CheckResult("3 tail law, R in [250, 500]", err <= 0.03, est.limit, 4.0, {"rel_err": err})


def criterion_4() -> CheckResult:
    t = 1e-2 * 2.0 ** -np.arange(0, 4)  # 1e-2 down to 1.25e-3
    est = spectral.jump_estimate_gaussian(SQUARE, t_grid=t)
    err = _rel(est.limit, 4.0)
    return CheckResult("4 Gaussian estimator, t in [1e-3, 1e-2]", err <= 0.01, est.limit, 4.0,
                       {"rel_err": err, "t_grid": [float(x) for x in t]})


def criterion_5() -> CheckResult:
    t = 1e-3
    start = time.perf_counter()
    H = heat.heat_evaluate(SQUARE, SQUARE, t)
    deficit = math.sqrt(math.pi) * H.deficit / t
    deriv = -math.sqrt(math.pi) * heat.heat_derivative(SQUARE, SQUARE, t)
    exact_deriv = -math.sqrt(math.pi) * heat.heat_derivative_exact(SQUARE, SQUARE, t)
    rel = heat.relative_heat_content_set(Shape.box((0, 0), (1, 1)), t)
    elapsed = time.perf_counter() - start
    e = [_rel(deficit, 4.0), _rel(deriv, 4.0), _rel(rel, 4.0 / math.sqrt(math.pi))]
    ok = e[0] <= 0.005 and e[1] <= 0.005 and e[2] <= 0.01 and elapsed < 5.0
    return CheckResult("5 heat asymptotics at t=1e-3", ok, deficit, 4.0,
                       {"derivative": deriv, "derivative_closed_form": exact_deriv, "relative_heat": rel,
                        "relative_target": 4.0 / math.sqrt(math.pi), "rel_errs": e})


def _polarization_ok(u: BVFunction, v: BVFunction, radii) -> float:
    """Largest relative polarization defect of the shell integrals at the given radii."""
    worst = 0.0
    w_all = u + v
    diam = max(u.diam, v.diam, w_all.diam)
    for r in radii:
        dirs, w = spectral.shell_directions(2, float(r), diam)
        xi = r * dirs
        fu, fv, fw = u.fourier(xi), v.fourier(xi), w_all.fourier(xi)
        lhs = np.abs(fw) ** 2 @ w
        rhs = np.abs(fu) ** 2 @ w + 2 * (fu * np.conj(fv)).real @ w + np.abs(fv) ** 2 @ w
        scale = (np.abs(fu) ** 2 + np.abs(fv) ** 2) @ w
        worst = max(worst, abs(lhs - rhs) / max(scale, 1e-300))
    return worst


def criterion_6(seed: int = 0, R_max: float = 300.0) -> CheckResult:
    catalog = box_pair_catalog(seed)
    radii = np.geomspace(1.0, R_max, 7)

    def one(item):
        u, v, J = item
        c = spectral.jump_estimate_cutoff(u, v, R_max=R_max).limit
        # box-pair functionals are linear in t up to e^{-dist^2/4t^2} terms, so t >= 2.5e-3 suffices
        g = spectral.jump_estimate_gaussian(u, v=v, t_grid=1e-2 * 2.0 ** -np.arange(3)).limit
        h = heat.heat_jump_estimate(u, v).limit
        return [_rel(c, J), _rel(g, J), _rel(h, J)], _polarization_ok(u, v, radii), J

    rows = pmap(one, catalog)
    worst = max(max(r[0]) for r in rows)
    pol = max(r[1] for r in rows)
    return CheckResult("6 estimator cross-agreement (10 box-union pairs)", worst <= 0.03 and pol <= 1e-10, worst,
                       0.03, {"max_rel_err": worst, "max_polarization_defect": float(pol),
                              "per_pair": [{"J": r[2], "rel_errs": r[0]} for r in rows]})


def criterion_7() -> CheckResult:
    square = Shape.box((0, 0), (1, 1))
    gen = stream(0, 7)
    xis = np.concatenate([[[0.0, 0.0], [1.0, 0.0], [0.3, -0.7]], gen.uniform(-2.5, 2.5, (7, 2))])
    errs = [minkowski.ft_difference_quotient(square, xi).diagnostics["abs_err"] for xi in xis]
    w = make_whisker_disk(1.0)
    q = minkowski.ft_difference_quotient(w, np.zeros(2))
    quotient = float(np.real(q.limit))
    per_ft = float(np.real(w.perimeter_fourier(np.zeros(2))))
    gap = quotient - per_ft
    ok = (max(errs) <= 1e-3 and _rel(quotient, 2 * math.pi + 2) <= 0.01
          and abs(per_ft - 2 * math.pi) <= 1e-9 and _rel(gap, 2.0) <= 0.05)
    return CheckResult("7 Minkowski dichotomy (square, whisker L=1)", ok, quotient, 2 * math.pi + 2,
                       {"square_max_abs_err": max(errs), "perimeter_ft_at_0": per_ft, "gap": gap})


def criterion_8(seed: int = 0, samples: int = 200_000) -> CheckResult:
    u = QUARTER_BALL
    J = 2 * math.pi * 0.25
    sets = [lattice_pointset(1, 2), lattice_pointset(2, 2), PointSet.random(5, 2, seed + 5),
            lattice_pointset(3, 2), lattice_pointset(4, 2)]
    agree = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationCapped)
        for P in sets:
            f = quadratic_discrepancy_fourier(u, P)
            m = quadratic_discrepancy_mc(u, P, samples=samples, seed=seed)
            bound = m.ci_half_width + (f.tail_bound or 0.0)
            agree.append({"N": P.N, "fourier": f.value, "tail_bound": f.tail_bound, "mc": m.value,
                          "ci": m.ci_half_width, "ok": abs(f.value - m.value) <= bound})
    ok_a = all(a["ok"] for a in agree)
    annihilation = 0.0
    for mm in (2, 3, 4, 5):
        P = lattice_pointset(mm, 2)
        k = np.stack(np.meshgrid(np.arange(-12, 13), np.arange(-12, 13), indexing="ij"), -1).reshape(-1, 2)
        off = k[np.any(k % mm != 0, axis=1)]
        annihilation = max(annihilation, float(np.max(np.abs(P.exp_sum(off)))))
    ok_b = annihilation <= 1e-10
    cm_ok = 0
    for i in range(200):
        gen = stream(seed, 88, i)
        P = PointSet.random(int(gen.integers(1, 40)), 2, int(gen.integers(2**31)))
        cm_ok += cassels_montgomery_check(P, float(gen.uniform(1.0, 10.0))).holds
    ok_c = cm_ok == 200
    study = scaling_study(u, "lattice", [m * m for m in range(2, 17)])
    norm = study.normalized
    slope = study.tail_slope(5)
    ok_d = bool(np.all(norm >= 0.1 * J) and np.all(norm <= 10 * J) and abs(slope) < 0.1)
    return CheckResult("8 discrepancy engine", ok_a and ok_b and ok_c and ok_d, float(norm[-1] / J), None,
                       {"agreement": agree, "max_offlattice_exp_sum": annihilation, "cm_holds": cm_ok,
                        "normalized_over_J": [float(x / J) for x in norm], "tail_slope": slope,
                        "parts": [ok_a, ok_b, ok_c, ok_d]})


def inequality_sweep(catalog, seed: int = 0) -> list[dict]:
    rows = []
    for i, u in enumerate(catalog):
        gen = stream(seed, 303, i)
        a = float(gen.uniform(0, 2 * math.pi))
        v = (math.cos(a), math.sin(a))
        dr = inequality.directional_bound_check(u, v)
        av = inequality.averaged_bound_check(u)
        iso = inequality.isoperimetric_check(u)
        for kind, r in (("directional", dr), ("averaged", av)):
            rows.append({"catalog_id": i, "check": kind, "lhs": r.max_lhs, "rhs": r.rhs, "margin": r.margin,
                         "holds": r.holds})
        rows.append({"catalog_id": i, "check": "isoperimetric", "lhs": iso.lhs, "rhs": iso.rhs,
                     "margin": iso.margin, "holds": iso.holds})
    return rows


def criterion_9(seed: int = 0) -> CheckResult:
    catalog = random_catalog(seed, 50)
    rows = inequality_sweep(catalog, seed)
    holds = all(r["holds"] for r in rows)
    invariant = True
    for i, u in enumerate(catalog[:10]):
        base = inequality.isoperimetric_check(u)
        gen = stream(seed, 404, i)
        for w in (u.scaled(float(gen.uniform(0.3, 3.0))), u.rotated(float(gen.uniform(0, 2 * math.pi))),
                  u.translated(gen.uniform(-5, 5, 2))):
            r = inequality.isoperimetric_check(w)
            invariant &= r.holds == base.holds and abs(r.rhs / r.lhs - base.rhs / base.lhs) <= 1e-9 * base.rhs / base.lhs
    worst = min(r["margin"] / r["rhs"] for r in rows if r["rhs"] > 0)
    return CheckResult("9 explicit-constant inequalities (50 random catalogs)", holds and invariant, worst, None,
                       {"all_hold": holds, "isoperimetric_invariant": invariant, "min_relative_margin": worst,
                        "constants": inequality.constants(2)})


def criterion_10(seed: int = 0) -> CheckResult:
    """Trivial suite serialized under one and two worker threads must match byte for byte."""
    import json

    from .parallel import set_threads

    blobs = []
    for n in (1, 2):
        set_threads(n)
        try:
            res = trivial_suite()
        finally:
            set_threads(None)
        blobs.append(json.dumps([r.to_dict() for r in res], sort_keys=True))
    ok = blobs[0] == blobs[1] and all(r.passed for r in res)
    return CheckResult("10 reproducibility across thread counts", ok, None, None, {"bytes": len(blobs[0])})


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def timed(fn, *args, **kwargs) -> CheckResult:
    start = time.perf_counter()
    r = fn(*args, **kwargs)
    r.seconds = time.perf_counter() - start
    return r


def acceptance_suite(which=None) -> list[CheckResult]:
    keys = sorted(CRITERIA) if which is None else list(which)
    return [timed(CRITERIA[k]) for k in keys]


def check_invariants_large(N_max: int = 10**6) -> dict:
    return {d: check_decomposition_invariants(N_max, d) for d in (2, 3)}


__all__ = ["CheckResult", "trivial_suite", "acceptance_suite", "CRITERIA", "random_catalog", "box_pair_catalog",
           "random_box_union", "inequality_sweep", "timed"]
