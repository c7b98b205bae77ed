"""Shapes, Fourier transforms, jump facets and norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special as sps

from bvf.errors import ValidationError
from bvf.geometry.facets import (
    directional_variation,
    jump_product,
    mean_abs_cosine,
    perimeter_of,
    total_variation,
)
from bvf.geometry.measure import l1_norm, l2_norm_sq, make_whisker_disk, sup_norm
from bvf.geometry.shapes import BVFunction, Shape, ball_volume, sphere_area


def ind(shape, w=1.0):
    return BVFunction.indicator(shape, w)


def ft_triangle_oracle(xi):
    """Direct 2D quadrature over the triangle (0,0),(1,0),(0,1)."""
    a, b = xi

    def part(f):
        return integrate.dblquad(lambda y, x: f(-2 * math.pi * (a * x + b * y)), 0, 1, 0, lambda x: 1 - x,
                                 epsabs=1e-12, epsrel=1e-12)[0]

    return part(math.cos) + 1j * part(math.sin)


@pytest.mark.parametrize("xi", [(0.0, 0.0), (0.3, -0.7), (1.5, 0.2), (-2.1, 3.3)])
def test_polygon_fourier_against_quadrature(xi):
    tri = Shape.polygon([(0, 0), (1, 0), (0, 1)])
    got = complex(tri.fourier(np.array([xi]))[0])
    want = ft_triangle_oracle(xi)
    assert abs(got - want) < 1e-10


@pytest.mark.parametrize("rho", [0.0, 0.4, 1.7, 6.3])
def test_disk_fourier_closed_form(rho):
    r = 0.8
    want = math.pi * r * r if rho == 0 else r * sps.j1(2 * math.pi * r * rho) / rho
    got = Shape.ball((0, 0), r).fourier(np.array([[rho, 0.0]]))[0]
    assert got == pytest.approx(want, abs=1e-13)


@pytest.mark.parametrize("rho", [0.3, 1.1, 2.5])
def test_ball3_fourier_radial_integral(rho):
    # hat(1_B)(rho) = int_0^r 4 pi s^2 sinc(2 rho s) ds with sin(2 pi rho s)/(2 pi rho s)
    r = 0.6
    want = integrate.quad(lambda s: 4 * math.pi * s * math.sin(2 * math.pi * rho * s) / (2 * math.pi * rho), 0, r,
                          epsabs=1e-14)[0]
    got = Shape.ball((0, 0, 0), r).fourier(np.array([[0.0, rho, 0.0]]))[0]
    assert complex(got).real == pytest.approx(want, abs=1e-12)


def test_translation_modulates_fourier():
    sq = Shape.box((0, 0), (1, 1))
    xi = np.array([[0.4, -1.3]])
    shift = np.array([0.25, 2.0])
    lhs = sq.translated(shift).fourier(xi)[0]
    rhs = np.exp(-2j * math.pi * xi[0] @ shift) * sq.fourier(xi)[0]
    assert abs(lhs - rhs) < 1e-13


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_rotation_rotates_fourier(theta, a, b):
    sq = Shape.box((0, 0), (1, 2))
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    xi = np.array([a, b])
    lhs = sq.rotated(theta).fourier((R @ xi)[None])[0]
    rhs = sq.fourier(xi[None])[0]
    assert abs(lhs - rhs) < 1e-11


def test_volumes_and_perimeters():
    assert Shape.box((0, 0), (2, 3)).volume == 6
    assert Shape.box((0, 0), (2, 3)).perimeter == 10
    assert Shape.box((0, 0, 0), (1, 2, 3)).perimeter == 22
    assert Shape.ball((0, 0), 2).perimeter == pytest.approx(4 * math.pi)
    assert Shape.ball((0, 0, 0), 1).volume == pytest.approx(4 * math.pi / 3)
    assert Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]).volume == pytest.approx(3)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_jump_product_examples():
    sq = ind(Shape.box((0, 0), (1, 1)))
    right = ind(Shape.box((1, 0), (2, 1)))
    assert jump_product(sq, sq).value == pytest.approx(4)
    # the shared edge carries opposite normals
    assert jump_product(sq, right).value == pytest.approx(-1)
    far = ind(Shape.box((5, 5), (6, 6)))
    assert jump_product(sq, far).value == 0


def test_directional_variation_square():
    sq = ind(Shape.box((0, 0), (1, 1)))
    assert directional_variation(sq, (1, 0)) == pytest.approx(2)
    assert directional_variation(sq, (1 / math.sqrt(2), 1 / math.sqrt(2))) == pytest.approx(2 * math.sqrt(2))


def test_mean_abs_cosine_integral():
    # int_{S^1} |cos| = 4, int_{S^2} |v_1| = 2 pi
    assert mean_abs_cosine(2) == pytest.approx(4)
    assert mean_abs_cosine(3) == pytest.approx(2 * math.pi)


def grid_total_variation(u, lo, hi, n):
    xs = lo + (hi - lo) * (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    vals = u(np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(n, n)
    h = (hi - lo) / n
    return (np.abs(np.diff(vals, axis=0)).sum() + np.abs(np.diff(vals, axis=1)).sum()) * h


def test_total_variation_against_grid_for_axis_boxes():
    # anisotropic grid TV is exact for axis-aligned boxes up to grid alignment
    u = ind(Shape.box((0, 0), (2, 2))) + ind(Shape.box((1, 1), (3, 2)), 2.0)
    got = total_variation(u)
    want = grid_total_variation(u, -0.5, 3.5, 800)
    assert got == pytest.approx(want, rel=1e-2)


def test_total_variation_disk_and_perimeter():
    disk = ind(Shape.ball((0, 0), 1.0), 3.0)
    assert total_variation(disk) == pytest.approx(6 * math.pi)
    assert perimeter_of(ind(Shape.ball((0, 0), 1.0))) == pytest.approx(2 * math.pi)


def test_overlapping_boxes_norms():
    u = ind(Shape.box((0, 0), (2, 2))) + ind(Shape.box((0, 0), (1, 1)))
    assert l2_norm_sq(u) == pytest.approx(7)
    assert l1_norm(u) == pytest.approx(5)
    assert sup_norm(u) == pytest.approx(2)


def test_norms_with_cancellation():
    u = ind(Shape.box((0, 0), (2, 1))) - ind(Shape.box((1, 0), (2, 1)))
    assert l1_norm(u) == pytest.approx(1)
    assert total_variation(u) == pytest.approx(4)


def test_whisker_area_and_dilation():
    w = make_whisker_disk(1.0)
    h = 0.1
    # big disk, plus the strip part outside it, plus the half disk beyond the tip
    strip = integrate.quad(lambda y: 2.0 - math.sqrt((1 + h) ** 2 - y * y), -h, h, epsabs=1e-14)[0]
    want = math.pi * (1 + h) ** 2 + strip + math.pi * h * h / 2
    assert w.dilated_area(h) == pytest.approx(want, rel=1e-10)


def test_whisker_rejects_bad_length():
    with pytest.raises(ValidationError):
        make_whisker_disk(0.0)


def test_zero_function():
    z = BVFunction.zero(2)
    assert z.is_zero
    assert total_variation(z) == 0
    assert l2_norm_sq(z) == 0


def test_scaling_scales_measures():
    sq = Shape.box((0, 0), (1, 2)).rotated(0.3)
    u = ind(sq).scaled(3.0)
    assert l1_norm(u) == pytest.approx(18)
    assert total_variation(u) == pytest.approx(18)
