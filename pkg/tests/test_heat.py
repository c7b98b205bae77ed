"""Heat content of indicator pairs against direct convolution integrals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from bvf.errors import ValidationError
from bvf.geometry.shapes import BVFunction, Shape
from bvf.heat import (
    heat_curve,
    heat_derivative,
    heat_derivative_exact,
    heat_evaluate,
    heat_jump_estimate,
    relative_heat_content_set,
)


def kernel_1d(z, t):
    # heat kernel at time t^2: variance 2 t^2
    return math.exp(-z * z / (4 * t * t)) / math.sqrt(4 * math.pi * t * t)


def interval_pair_oracle(a, b, c, d, t):
    """int_a^b int_c^d k(x - y) dy dx by nested quadrature."""
    inner = lambda x: integrate.quad(lambda y: kernel_1d(x - y, t), c, d, epsabs=1e-13, epsrel=1e-12,
                                     points=[x] if c < x < d else None)[0]
    return integrate.quad(inner, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]


def box(lo, hi):
    return BVFunction.indicator(Shape.box(lo, hi))


@pytest.mark.parametrize("t", [0.05, 0.2])
def test_box_pair_against_convolution(t):
    u = box((0, 0), (1, 2))
    v = box((0.5, 1), (2, 3))
    want = interval_pair_oracle(0, 1, 0.5, 2, t) * interval_pair_oracle(0, 2, 1, 3, t)
    hv = heat_evaluate(u, v, t)
    assert hv.method == "closed_form"
    assert hv.H == pytest.approx(want, rel=1e-9)
    assert hv.H0 == pytest.approx(0.5)


def lens(s):
    s = min(s, 2.0)
    return 2 * math.acos(s / 2) - (s / 2) * math.sqrt(4 - s * s)


@pytest.mark.parametrize("t", [0.03, 0.1])
def test_disk_self_heat_against_radial_integral(t):
    # H(t) = int A(|z|) k_2(z) dz with A the lens area of two unit disks
    k = lambda s: math.exp(-s * s / (4 * t * t)) / (4 * math.pi * t * t)
    deficit = integrate.quad(lambda s: 2 * math.pi * s * (math.pi - lens(s)) * k(s), 0, 40 * t,
                             epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    hv = heat_evaluate(BVFunction.indicator(Shape.ball((0, 0), 1.0)), None, t)
    assert hv.deficit == pytest.approx(deficit, rel=1e-7)


def test_rotated_square_uses_quadrature_and_matches_axis_value():
    t = 0.02
    axis = heat_evaluate(box((0, 0), (1, 1)), None, t)
    rot = heat_evaluate(BVFunction.indicator(Shape.box((0, 0), (1, 1)).rotated(0.4)), None, t)
    assert rot.method == "quadrature"
    assert rot.deficit == pytest.approx(axis.deficit, rel=1e-6)


def test_triangle_deficit_small_t():
    tri = Shape.polygon([(0, 0), (1, 0), (0, 1)])
    t = 1e-3
    # sqrt(pi) deficit / t tends to the perimeter 2 + sqrt(2)
    val = math.sqrt(math.pi) * heat_evaluate(BVFunction.indicator(tri), None, t).deficit / t
    assert val == pytest.approx(2 + math.sqrt(2), rel=2e-3)


def test_exact_derivative_matches_central_difference():
    u = box((0, 0), (1, 1)) + box((0.5, 0.25), (2, 1.5))
    v = box((0.2, -0.5), (1.2, 0.7))
    for t in (0.01, 0.1):
        assert heat_derivative(u, v, t) == pytest.approx(heat_derivative_exact(u, v, t), rel=1e-6)


def test_square_derivative_limit():
    # H'(t) -> -|Du| / sqrt(pi) = -4 / sqrt(pi)
    assert heat_derivative_exact(box((0, 0), (1, 1)), None, 1e-4) == pytest.approx(-4 / math.sqrt(math.pi), rel=1e-3)


def test_jump_estimate_square_and_adjacent_pair():
    sq = box((0, 0), (1, 1))
    right = box((1, 0), (2, 1))
    assert heat_jump_estimate(sq).limit == pytest.approx(4.0, rel=1e-6)
    assert heat_jump_estimate(sq, right).limit == pytest.approx(-1.0, rel=1e-4)


def test_relative_heat_content_square():
    assert relative_heat_content_set(Shape.box((0, 0), (1, 1)), 1e-4) == pytest.approx(4 / math.sqrt(math.pi), rel=1e-3)


def test_heat_curve_monotone_and_mass():
    u = box((0, 0), (1, 1))
    curve = heat_curve(u, None, [0.4, 0.1, 0.02])
    assert curve.H0 == pytest.approx(1.0)
    # heat content of a set with itself decreases in t
    assert np.all(np.diff(curve.H[::-1]) <= 1e-15)


def test_validation():
    with pytest.raises(ValidationError):
        heat_evaluate(box((0, 0), (1, 1)), None, 0.0)
    with pytest.raises(ValidationError):
        heat_evaluate(box((0, 0), (1, 1)), box((0, 0, 0), (1, 1, 1)), 0.1)
    with pytest.raises(ValidationError):
        heat_jump_estimate(box((0, 0), (1, 1)), t_grid=[0.1, -0.1])


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.005, 0.5)
)
def test_symmetry_and_translation(w, h, x, y, t):
    u = box((0, 0), (w, h))
    v = box((x, y), (x + 1, y + 0.5))
    a = heat_evaluate(u, v, t).H
    b = heat_evaluate(v, u, t).H
    c = heat_evaluate(u.translated((0.3, 0.7)), v.translated((0.3, 0.7)), t).H
    assert a == pytest.approx(b, abs=1e-14)
    assert a == pytest.approx(c, abs=1e-12)
    assert 0.0 <= a <= min(w * h, 0.5) + 1e-12
