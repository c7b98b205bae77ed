"""Explicit constants and the translation-energy and isoperimetric inequalities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from bvf.checks import random_box_union, random_catalog
from bvf.errors import ValidationError
from bvf.geometry.shapes import BVFunction, Shape
from bvf.inequality import (
    C_DIRECTIONAL,
    COSINE_CONSTANT,
    averaged_bound_check,
    averaged_constant,
    constants,
    directional_bound_check,
    isoperimetric_check,
    isoperimetric_constant,
    tail_constant,
)
from bvf.parallel import stream

SQUARE = BVFunction.indicator(Shape.box((0, 0), (1, 1)))


def test_cosine_constant_is_the_minimum_ratio():
    t = np.linspace(1e-4, 1.0, 20001)
    ratio = 2 * (1 - np.cos(t)) / t**2
    # 2 (1 - cos t) >= (c / (4 pi^2)) t^2 on |t| <= 1, with equality at t = 1
    assert ratio.min() == pytest.approx(COSINE_CONSTANT / (4 * math.pi**2), rel=1e-12)
    assert C_DIRECTIONAL == pytest.approx(4 * math.pi / COSINE_CONSTANT)


def sphere_abs_v1(d):
    if d == 2:
        return integrate.quad(lambda a: abs(math.cos(a)), 0, 2 * math.pi, points=[math.pi / 2, 1.5 * math.pi])[0]
    # polar angle from the first axis: int |cos| 2 pi sin
    return integrate.quad(lambda a: abs(math.cos(a)) * 2 * math.pi * math.sin(a), 0, math.pi, points=[math.pi / 2])[0]


@pytest.mark.parametrize("d,area", [(2, 2 * math.pi), (3, 4 * math.pi)])
def test_averaged_constant_from_sphere_integral(d, area):
    assert averaged_constant(d) == pytest.approx(C_DIRECTIONAL * d * sphere_abs_v1(d) / area, rel=1e-12)
    assert tail_constant(d) == pytest.approx(2 * averaged_constant(d))


def test_frozen_constant_values():
    assert COSINE_CONSTANT == pytest.approx(36.29628, abs=1e-5)
    assert C_DIRECTIONAL == pytest.approx(0.34622, abs=1e-5)
    assert averaged_constant(2) == pytest.approx(0.44082, abs=1e-5)
    assert averaged_constant(3) == pytest.approx(0.51932, abs=1e-5)
    assert isoperimetric_constant(2) == pytest.approx(2.54493, abs=1e-5)
    assert isoperimetric_constant(3) == pytest.approx(2.58281, abs=1e-5)
    assert set(constants(2)) == {"cosine", "directional", "averaged", "tail", "isoperimetric"}


def test_isoperimetric_constant_from_optimization():
    # minimize omega R^d A + C B / R numerically and compare with the closed form
    d, A, B = 2, 1.7, 3.1
    C = tail_constant(d)
    res = optimize.minimize_scalar(lambda R: math.pi * R**2 * A + C * B / R, bounds=(1e-3, 1e3), method="bounded",
                                   options={"xatol": 1e-12})
    closed = isoperimetric_constant(d) * A ** (1 / 3) * B ** (2 / 3)
    assert res.fun == pytest.approx(closed, rel=1e-9)


def test_square_examples():
    dirc = directional_bound_check(SQUARE, (1, 0))
    assert dirc.holds
    assert dirc.max_lhs == pytest.approx(1 / math.pi**2, rel=2e-2)
    assert dirc.rhs == pytest.approx(2 * C_DIRECTIONAL)
    avg = averaged_bound_check(SQUARE)
    assert avg.holds and avg.max_lhs == pytest.approx(2 / math.pi**2, rel=2e-2)
    iso = isoperimetric_check(SQUARE)
    assert iso.lhs == pytest.approx(1.0)
    assert iso.rhs == pytest.approx(6.41283, abs=1e-5)
    assert iso.margin > 0


def test_diagonal_direction_for_square():
    v = (1 / math.sqrt(2), 1 / math.sqrt(2))
    chk = directional_bound_check(SQUARE, v)
    assert chk.holds
    assert chk.rhs == pytest.approx(C_DIRECTIONAL * 2 * math.sqrt(2))


def test_zero_function_holds_trivially():
    z = BVFunction.zero(2)
    assert directional_bound_check(z, (0, 1)).max_lhs == 0.0
    assert averaged_bound_check(z).holds


def test_validation():
    with pytest.raises(ValidationError):
        directional_bound_check(SQUARE, (1, 1))
    with pytest.raises(ValidationError):
        averaged_bound_check(SQUARE, R_grid=[1.0, -2.0])


def test_isoperimetric_scale_invariance():
    u = BVFunction.indicator(Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]))
    a = isoperimetric_check(u)
    b = isoperimetric_check(u.scaled(3.7))
    assert b.lhs / b.rhs == pytest.approx(a.lhs / a.rhs, rel=1e-10)


def test_isoperimetric_in_three_dimensions():
    cube = BVFunction.indicator(Shape.box((0, 0, 0), (1, 1, 1)))
    chk = isoperimetric_check(cube)
    assert chk.holds
    assert chk.rhs == pytest.approx(isoperimetric_constant(3) * 6 ** 0.75)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_random_box_unions_satisfy_all_bounds(seed):
    u = random_box_union(stream(seed, 5))
    grid = np.geomspace(0.25, 16.0, 9)
    assert isoperimetric_check(u).holds
    assert averaged_bound_check(u, R_grid=grid).holds
    assert directional_bound_check(u, (0.6, 0.8), R_grid=grid).holds


def test_catalog_entries_satisfy_isoperimetric():
    for u in random_catalog(seed=1, size=20):
        assert isoperimetric_check(u).holds
