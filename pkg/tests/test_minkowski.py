"""Outer Minkowski content, dilation transforms and the weak-convergence probe."""

import math

import numpy as np
import pytest
from scipy import integrate

from bvf.errors import ValidationError
from bvf.geometry.measure import make_whisker_disk
from bvf.geometry.shapes import Shape
from bvf.minkowski import (
    ProbeFunction,
    RoundedRegion,
    boundary_integral,
    dilation_family,
    ft_difference_quotient,
    ft_rounded,
    weak_convergence_probe,
    whisker_dilation_ft,
)
from bvf.special import j0

SQUARE = Shape.box((0, 0), (1, 1))


def rounded_square_ft_oracle(h, xi):
    """Direct quadrature over [-h, 1+h]^2 intersected with the rounded square."""
    a, b = xi

    def half_width(x):
        # vertical extent of the rounded square at abscissa x
        if 0 <= x <= 1:
            return -h, 1 + h
        dx = -x if x < 0 else x - 1
        e = math.sqrt(max(h * h - dx * dx, 0.0))
        return -e, 1 + e

    def part(f):
        return integrate.dblquad(lambda y, x: f(-2 * math.pi * (a * x + b * y)), -h, 1 + h,
                                 lambda x: half_width(x)[0], lambda x: half_width(x)[1],
                                 epsabs=1e-12, epsrel=1e-12)[0]

    return part(math.cos) + 1j * part(math.sin)


@pytest.mark.parametrize("xi", [(0.0, 0.0), (0.7, -0.4), (2.0, 1.5)])
def test_rounded_square_fourier_against_quadrature(xi):
    h = 0.15
    got = ft_rounded(RoundedRegion.from_polygon(SQUARE, h), np.array(xi))
    assert abs(got - rounded_square_ft_oracle(h, xi)) < 1e-9


def test_rounded_region_steiner_values():
    r = RoundedRegion.from_polygon(SQUARE, 0.1)
    assert r.area == pytest.approx(1 + 0.4 + math.pi * 0.01)
    assert r.arc_span == pytest.approx(2 * math.pi)
    with pytest.raises(ValidationError):
        RoundedRegion.from_polygon(Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]), 0.1)


def test_square_content_is_perimeter():
    fam = dilation_family(SQUARE)
    assert fam.method == "steiner"
    assert fam.sm == pytest.approx(4.0, abs=1e-12)


def test_whisker_content_exceeds_perimeter_by_two():
    w = make_whisker_disk(1.0)
    fam = dilation_family(w)
    assert fam.method == "exact"
    # the segment is counted twice by the outer content and not at all by the perimeter
    assert fam.sm == pytest.approx(2 * math.pi + 2, rel=1e-4)


def test_nonconvex_polygon_tube_estimate():
    L = Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    fam = dilation_family(L, h_grid=[0.02, 0.01], samples=200_000, seed=3)
    assert fam.sm == pytest.approx(L.perimeter, rel=0.02)


@pytest.mark.parametrize("xi", [(0.5, 0.0), (0.3, -1.1)])
def test_square_difference_quotient(xi):
    est = ft_difference_quotient(SQUARE, xi)
    assert est.diagnostics["abs_err"] < 1e-3


def test_disk_difference_quotient():
    est = ft_difference_quotient(Shape.ball((0, 0), 1.0), (0.8, 0.2))
    assert est.diagnostics["abs_err"] < 1e-3


def test_whisker_transform_zero_frequency_and_validation():
    w = make_whisker_disk(1.0)
    assert whisker_dilation_ft(w, 0.1, np.array([0.0, 0.0])).real == pytest.approx(w.dilated_area(0.1), rel=1e-10)
    with pytest.raises(ValidationError):
        whisker_dilation_ft(w, 1.5, np.array([0.1, 0.0]))


def test_whisker_quotient_limit_at_zero_frequency():
    est = ft_difference_quotient(make_whisker_disk(1.0), (0.0, 0.0))
    assert complex(est.limit).real == pytest.approx(2 * math.pi + 2, rel=1e-3)


def test_boundary_integral_of_one_is_perimeter():
    assert boundary_integral(SQUARE, ProbeFunction("one", ())) == pytest.approx(4.0)
    # int over the unit circle of cos(2 pi x) = 2 pi J0(2 pi)
    val = boundary_integral(Shape.ball((0, 0), 1.0), ProbeFunction("cos", (1.0, 0.0)))
    assert val == pytest.approx(2 * math.pi * j0(2 * math.pi), abs=1e-9)


def test_probe_verdicts():
    table = weak_convergence_probe(SQUARE)
    assert all(table.verdicts.values())
    assert "not certified" in table.note
    assert table.to_csv().startswith("phi_id,h,value,target,abs_err\n")


def test_probe_rejects_nonconvex():
    with pytest.raises(ValidationError):
        weak_convergence_probe(Shape.polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]))


def test_dilation_rejects_nonpositive_h():
    with pytest.raises(ValidationError):
        dilation_family(SQUARE, h_grid=[0.1, 0.0])
