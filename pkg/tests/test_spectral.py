"""Spectral cutoff functionals, the Gaussian and tail estimators, and their invariances."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special as sps

from bvf.errors import InsufficientRange, ValidationError
from bvf.geometry.shapes import BVFunction, Shape
from bvf.spectral import (
    RadialSampler,
    cutoff_functional,
    finite_perimeter_diagnostic,
    jump_estimate_cutoff,
    jump_estimate_gaussian,
    shell_energy,
    spectral_profile,
    tail_asymptote,
    tail_energy,
    tauberian_crosscheck,
)

SQUARE = BVFunction.indicator(Shape.box((0, 0), (1, 1)))
DISK = BVFunction.indicator(Shape.ball((0, 0), 1.0))


def disk_phi_oracle(R, p):
    # |1_B^(r)|^2 = J1(2 pi r)^2 / r^2, integrated over the disk of radius R
    f = lambda r: 2 * math.pi * r ** (p + 1) * (sps.j1(2 * math.pi * r) / r) ** 2
    edges = np.linspace(0, R, int(8 * R) + 2)
    return math.fsum(integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13)[0] for a, b in zip(edges[:-1], edges[1:]))


@pytest.mark.parametrize("R,p", [(0.5, 0.0), (3.0, 0.0), (3.0, 2.0), (7.25, 2.0)])
def test_disk_cutoff_against_bessel_quadrature(R, p):
    assert cutoff_functional(DISK, R, p) == pytest.approx(disk_phi_oracle(R, p), rel=1e-9)


def test_square_shell_energy_against_cartesian_sum():
    # g_0(r) = r int_{S^1} |sinc|^2: compare with a dense trapezoid rule in angle
    r = 2.3
    th = np.linspace(0, 2 * math.pi, 20001)[:-1]
    xi = r * np.stack([np.cos(th), np.sin(th)], axis=1)
    F = np.abs(SQUARE.fourier(xi)) ** 2
    want = r * F.mean() * 2 * math.pi
    got, err = shell_energy(SQUARE, r, p=0.0)
    assert got == pytest.approx(want, rel=1e-9)
    assert err < 1e-8


def test_radial_shortcut_matches_general_path():
    u = BVFunction.indicator(Shape.ball((0.3, -0.2), 0.7), 2.0) + BVFunction.indicator(Shape.ball((0.3, -0.2), 0.3))
    fast = RadialSampler(u)
    slow = RadialSampler(u)
    assert fast.radial
    slow.radial = False
    R = [0.7, 2.0, 5.5]
    a, _ = fast.cumulative_many(2.0, R)
    b, _ = slow.cumulative_many(2.0, R)
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_cumulative_many_matches_cumulative():
    s = RadialSampler(SQUARE)
    radii = [0.1, 1.3, 4.0, 4.01]
    many, _ = s.cumulative_many(0.0, radii)
    single = [s.cumulative(0.0, R)[0] for R in radii]
    np.testing.assert_allclose(many, single, rtol=1e-12)


def test_parseval_limit():
    # ||1_square||^2 = 1 and the tail beyond R behaves like 4 / (2 pi^2 R)
    R = 40.0
    tail = tail_energy(SQUARE, R)
    assert 2 * math.pi**2 * R * tail == pytest.approx(4.0, rel=2e-2)
    assert cutoff_functional(SQUARE, R, 0.0) + tail == pytest.approx(1.0, abs=1e-9)


def test_cutoff_estimator_disk_and_square():
    disk = jump_estimate_cutoff(DISK, R_max=100.0)
    assert disk.limit == pytest.approx(2 * math.pi, rel=1e-4)
    sq = jump_estimate_cutoff(SQUARE, R_max=100.0)
    assert sq.limit == pytest.approx(4.0, rel=2e-2)


def test_scaling_by_lambda():
    lam = 2.0
    base = jump_estimate_cutoff(DISK, R_max=60.0).limit
    big = jump_estimate_cutoff(BVFunction.indicator(Shape.ball((0, 0), lam)), R_max=60.0).limit
    assert big / base == pytest.approx(lam, rel=1e-3)


def test_translation_and_rotation_invariance():
    R = 6.0
    base = cutoff_functional(SQUARE, R, 2.0)
    moved = SQUARE.translated((0.37, -1.2)).rotated(0.61)
    assert cutoff_functional(moved, R, 2.0) == pytest.approx(base, rel=1e-8)


def test_polarization_identity():
    u = SQUARE
    v = BVFunction.indicator(Shape.box((1, 0), (2, 1)))
    R = 30.0
    uv = jump_estimate_cutoff(u, v, R_max=R).limit
    plus = jump_estimate_cutoff(u + v, R_max=R).limit
    minus = jump_estimate_cutoff(u - v, R_max=R).limit
    assert uv == pytest.approx((plus - minus) / 4, abs=1e-8)


def test_mixed_adjacent_squares_negative():
    v = BVFunction.indicator(Shape.box((1, 0), (2, 1)))
    est = jump_estimate_cutoff(SQUARE, v, R_max=200.0)
    assert est.limit == pytest.approx(-1.0, abs=0.05)


def test_gaussian_estimator_square_exact():
    est = jump_estimate_gaussian(SQUARE, t_grid=[1e-2, 5e-3])
    assert est.limit == pytest.approx(4.0, abs=1e-6)
    assert est.diagnostics["slope"] == pytest.approx(-8 / math.sqrt(math.pi), rel=1e-4)


def test_tail_asymptote_disk():
    est = tail_asymptote(DISK, R_max=100.0)
    # both estimators converge to the perimeter 2 pi
    ref = jump_estimate_cutoff(DISK, R_max=100.0).limit
    assert est.limit == pytest.approx(ref, rel=2e-2)


def test_zero_function_is_zero():
    z = BVFunction.zero(2)
    assert cutoff_functional(z, 5.0) == 0.0
    assert jump_estimate_gaussian(z).limit == 0.0


def test_validation_errors():
    with pytest.raises(ValidationError):
        cutoff_functional(SQUARE, -1.0)
    with pytest.raises(ValidationError):
        jump_estimate_cutoff(SQUARE, R_max=0.0)
    with pytest.raises(ValidationError):
        tail_asymptote(SQUARE, R_max=-3.0)
    with pytest.raises(ValidationError):
        tail_asymptote(SQUARE, R_max=10.0, R_min=20.0)
    with pytest.raises(ValidationError):
        jump_estimate_gaussian(SQUARE, t_grid=[0.01, -1.0])
    with pytest.raises(ValidationError):
        shell_energy(SQUARE, 0.0)


def test_finite_perimeter_diagnostic():
    with pytest.raises(InsufficientRange):
        finite_perimeter_diagnostic(SQUARE, [1.0, 10.0])
    diag = finite_perimeter_diagnostic(DISK, np.geomspace(0.5, 60.0, 12))
    assert diag.bounded and diag.heuristic


def test_tauberian_crosscheck_disk():
    prof = spectral_profile(DISK, 60.0, p=2.0)
    with pytest.raises(InsufficientRange):
        tauberian_crosscheck(None, 0.5, lam=[1.0, 2.0], cumulative=[0.0, 1.0])
    chk = tauberian_crosscheck(prof, 0.5)
    assert chk.gamma_factor_consistent


@settings(max_examples=8, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-2, 2), st.floats(-2, 2))
def test_cutoff_monotone_and_invariant_for_random_disks(r, x, y):
    u = BVFunction.indicator(Shape.ball((x, y), r))
    vals = [cutoff_functional(u, R, 0.0) for R in (0.5, 1.0, 2.0)]
    assert vals[0] <= vals[1] <= vals[2] <= math.pi * r * r * (1 + 1e-9)
