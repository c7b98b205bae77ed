"""Point sets, recursive decompositions, discrepancy estimators and the Cassels-Montgomery bound."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvf.discrepancy import (
    ExpSumTable,
    PointSet,
    TruncationCapped,
    build_pointset,
    cassels_montgomery_check,
    check_decomposition_invariants,
    cm_witness,
    composite_pointset,
    decomposition_depth,
    discrepancy,
    exp_sum_table,
    half_lattice,
    lattice_pointset,
    lattice_tail_sum,
    periodize_eval,
    quadratic_discrepancy_fourier,
    quadratic_discrepancy_mc,
    recursive_decomposition,
    scaling_study,
)
from bvf.errors import DegenerateDilation, ValidationError
from bvf.geometry.shapes import BVFunction, Shape

QUARTER_BALL = BVFunction.indicator(Shape.ball((0, 0), 0.25))


def fourier(u, P, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationCapped)
        return quadratic_discrepancy_fourier(u, P, **kw)


def small_ball_d2_oracle(m):
    """D_2 for the ball of radius 1/4 and the m x m lattice, with m <= 2.

    The dilated balls around distinct lattice points never overlap, so the count
    is a Bernoulli variable with p = m^2 pi delta^2 / 16; average p (1 - p) over
    delta in (0, 1] and multiply by the rotation mass 2 pi.
    """
    a = m * m * math.pi / 16
    return 2 * math.pi * (a / 3 - a * a / 5)


# -- point sets and decompositions ------------------------------------------


def test_lattice_pointset_shape():
    P = lattice_pointset(3, 2)
    assert P.N == 9 and P.d == 2
    assert P.params == {"m": 3}
    with pytest.raises(ValidationError):
        lattice_pointset(0, 2)


def test_points_wrap_to_torus():
    P = PointSet.explicit([[1.25, -0.5]])
    np.testing.assert_allclose(P.points, [[0.25, 0.5]])


def test_random_pointset_is_seeded():
    np.testing.assert_array_equal(PointSet.random(10, 2, 4).points, PointSet.random(10, 2, 4).points)
    assert not np.array_equal(PointSet.random(10, 2, 4).points, PointSet.random(10, 2, 5).points)


def test_decomposition_depth():
    assert decomposition_depth(2) == 3
    assert decomposition_depth(3) == 5


def test_seven_points_in_the_plane():
    plan = recursive_decomposition(7, 2)
    assert plan.parts == (4, 1, 1, 1)
    assert plan.remainder == 0
    assert plan.sides == (2, 1, 1, 1)
    P = composite_pointset(plan)
    assert P.N == 7 and P.provenance == "composite"


def test_perfect_power_gives_lattice():
    P = composite_pointset(recursive_decomposition(16, 2))
    assert P.provenance == "lattice" and P.params["m"] == 4


@pytest.mark.parametrize("d", [2, 3])
def test_decomposition_invariants_up_to_a_million(d):
    res = check_decomposition_invariants(10**6, d)
    assert res["relazione"] and res["recursione"] and res["conservation"]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**9), st.sampled_from([2, 3]))
def test_plan_invariants_single(N, d):
    plan = recursive_decomposition(N, d)
    assert sum(plan.parts) + plan.remainder == N
    assert plan.relazione_holds()
    assert plan.recursione_holds()


def test_decomposition_rejects_bad_n():
    with pytest.raises(ValidationError):
        recursive_decomposition(0, 2)


# -- pointwise discrepancy --------------------------------------------------


def brute_ball_count(P, center, r):
    diff = P.points - np.asarray(center)
    diff -= np.round(diff)
    return int(np.sum(np.sum(diff * diff, axis=1) < r * r))


@pytest.mark.parametrize("tau", [(0.5, 0.5), (0.03, 0.97), (0.31, 0.12)])
def test_pointwise_discrepancy_against_count(tau):
    P = lattice_pointset(10, 2)
    u = BVFunction.indicator(Shape.ball((0, 0), 0.3))
    want = brute_ball_count(P, tau, 0.3) - P.N * math.pi * 0.09
    assert discrepancy(u, P, tau=tau) == pytest.approx(want, abs=1e-9)


def test_box_tiling_has_zero_discrepancy():
    u = BVFunction.indicator(Shape.box((0, 0), (0.5, 0.5)))
    assert discrepancy(u, lattice_pointset(4, 2)) == pytest.approx(0.0, abs=1e-12)
    # half-open boxes tile the torus exactly
    x = np.random.default_rng(0).random((50, 2))
    halves = BVFunction.indicator(Shape.box((0, 0), (0.5, 1))) + BVFunction.indicator(Shape.box((0.5, 0), (1, 1)))
    np.testing.assert_allclose(periodize_eval(halves, x), 1.0)


def test_dilation_errors():
    P = lattice_pointset(2, 2)
    with pytest.raises(DegenerateDilation):
        discrepancy(QUARTER_BALL, P, delta=0.0)
    with pytest.raises(ValidationError):
        discrepancy(QUARTER_BALL, P, delta=1.5)
    with pytest.raises(ValidationError):
        discrepancy(QUARTER_BALL, lattice_pointset(2, 3))


# -- exponential sums ------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 9), st.integers(-30, 30), st.integers(-30, 30))
def test_lattice_annihilation(m, a, b):
    P = lattice_pointset(m, 2)
    s = P.exp_sum(np.array([[a, b]]))[0]
    if a % m == 0 and b % m == 0:
        assert s == pytest.approx(m * m)
    else:
        assert abs(s) < 1e-10


def test_half_lattice_covers_ball_once():
    n = half_lattice(5, 2)
    full = {tuple(v) for v in n} | {tuple(-v) for v in n}
    want = {(i, j) for i in range(-5, 6) for j in range(-5, 6) if 0 < i * i + j * j <= 25}
    assert full == want
    assert len(full) == 2 * len(n)


def test_exp_sum_table_conjugate_symmetry():
    P = PointSet.random(13, 2, 1)
    tab = exp_sum_table(P, 6.0)
    n = np.array([(i, j) for i in range(-6, 7) for j in range(-6, 7) if 0 < i * i + j * j <= 36])
    brute = float(np.sum(np.abs(P.exp_sum(n)) ** 2))
    assert tab.full_sum() == pytest.approx(brute, rel=1e-12)
    keys, w = tab.grouped()
    assert w.sum() == pytest.approx(brute, rel=1e-12)


def test_lattice_tail_sum_is_an_upper_bound():
    M = 8.0
    R = 300
    ax = np.arange(-R, R + 1)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    r = np.sqrt(X * X + Y * Y)
    sel = (r > M) & (r <= R)
    partial = float(np.sum(r[sel] ** -3.0))
    assert partial <= lattice_tail_sum(M, 2)
    # and the bound is not wildly loose: the remaining tail is below 2 pi / R
    assert lattice_tail_sum(M, 2) < 3 * (partial + 2 * math.pi / R)


# -- quadratic discrepancy -------------------------------------------------


@pytest.mark.parametrize("m", [1, 2])
def test_fourier_matches_bernoulli_oracle(m):
    rep = fourier(QUARTER_BALL, lattice_pointset(m, 2))
    want = small_ball_d2_oracle(m)
    assert abs(rep.value - want) <= rep.tail_bound
    # frozen values of the truncated series
    assert rep.value == pytest.approx({1: 0.35888, 2: 0.86196}[m], abs=5e-5)


@pytest.mark.parametrize("m", [1, 2])
def test_monte_carlo_matches_bernoulli_oracle(m):
    rep = quadratic_discrepancy_mc(QUARTER_BALL, lattice_pointset(m, 2), samples=40_000, seed=2)
    assert abs(rep.value - small_ball_d2_oracle(m)) <= rep.ci_half_width


def test_fourier_and_mc_agree_random_set():
    P = PointSet.random(6, 2, 11)
    f = fourier(QUARTER_BALL, P)
    m = quadratic_discrepancy_mc(QUARTER_BALL, P, samples=40_000, seed=1)
    assert abs(f.value - m.value) <= f.tail_bound + m.ci_half_width


def test_mc_deterministic_and_thread_independent():
    P = PointSet.random(5, 2, 3)
    a = quadratic_discrepancy_mc(QUARTER_BALL, P, samples=9000, seed=4, threads=1)
    b = quadratic_discrepancy_mc(QUARTER_BALL, P, samples=9000, seed=4, threads=2)
    assert a.value == b.value and a.ci_half_width == b.ci_half_width


def test_mc_interval_shrinks_like_root_n():
    P = lattice_pointset(2, 2)
    a = quadratic_discrepancy_mc(QUARTER_BALL, P, samples=8192, seed=0)
    b = quadratic_discrepancy_mc(QUARTER_BALL, P, samples=4 * 8192, seed=0)
    assert b.ci_half_width / a.ci_half_width == pytest.approx(0.5, rel=0.15)


def test_fourier_translation_invariant_and_quadratic_in_weight():
    P = PointSet.random(7, 2, 9)
    base = fourier(QUARTER_BALL, P, M=16).value
    assert fourier(QUARTER_BALL, P.translated((0.3, 0.71)), M=16).value == pytest.approx(base, rel=1e-10)
    assert fourier(2.0 * QUARTER_BALL, P, M=16).value == pytest.approx(4 * base, rel=1e-10)


def test_truncation_capped_warning_and_report():
    with pytest.warns(TruncationCapped):
        rep = quadratic_discrepancy_fourier(QUARTER_BALL, lattice_pointset(3, 2))
    assert rep.truncation == 64
    assert rep.warnings
    assert rep.uncertainty == rep.tail_bound


def test_composite_bound_by_parts():
    # D of a union is the sum of the parts' D, so Cauchy-Schwarz bounds |D|^2 samplewise
    plan = recursive_decomposition(7, 2)
    parts = [lattice_pointset(s, 2) for s in plan.sides]
    kw = dict(samples=6000, seed=3)
    whole = quadratic_discrepancy_mc(QUARTER_BALL, composite_pointset(plan), **kw).value
    split = sum(quadratic_discrepancy_mc(QUARTER_BALL, P, **kw).value for P in parts)
    assert whole <= (plan.K + 2) * split


def test_scaling_study_lattice_band():
    study = scaling_study(QUARTER_BALL, "lattice", [4, 9, 16, 25, 36], M=32)
    J = 2 * math.pi * 0.25
    assert np.all((study.normalized > 0.1 * J) & (study.normalized < 10 * J))
    assert study.to_csv().splitlines()[0].startswith("N,")
    with pytest.raises(ValidationError):
        scaling_study(QUARTER_BALL, "lattice", [9, 4])
    with pytest.raises(ValidationError):
        build_pointset("nope", 4, 2)


# -- Cassels-Montgomery ----------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.floats(1.0, 12.0), st.integers(0, 2**31 - 1), st.sampled_from([2, 3]))
def test_cassels_montgomery_random(N, M, seed, d):
    assert cassels_montgomery_check(PointSet.random(N, d, seed), M).holds


def test_cassels_montgomery_lattice_value():
    chk = cassels_montgomery_check(lattice_pointset(4, 2), 3.0)
    assert chk.rhs == pytest.approx(-142.90266, abs=1e-5)
    assert chk.lhs == pytest.approx(0.0, abs=1e-20) and chk.holds
    with pytest.raises(ValidationError):
        cassels_montgomery_check(lattice_pointset(4, 2), 0.5)


def test_cm_witness():
    w = cm_witness(2.0, 2)
    assert w.count == 5 and w.count >= w.target
    np.testing.assert_allclose(w.x, [0.0, 0.0])
    assert w.coefficients_ok and w.nonnegative_ok
    with pytest.raises(ValidationError):
        cm_witness(2.0, 2, resolution=0.5)


def test_exp_sum_table_dataclass():
    tab = ExpSumTable(2, 1.0, np.array([[1, 0], [0, 1]]), np.array([1.0, 4.0]), np.array([1, 1]))
    keys, w = tab.grouped()
    assert list(keys) == [1] and list(w) == [10.0]
