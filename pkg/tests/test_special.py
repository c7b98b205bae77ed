"""Bessel and error functions against high-precision reference tables."""

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvf import special

REF = json.loads((Path(__file__).parent / "fixtures" / "special_reference.json").read_text())


@pytest.mark.parametrize("row", REF["bessel"], ids=lambda r: f"x={r[0]:g}")
def test_bessel_against_reference(row):
    x, j0, j1 = row
    assert special.j0(x) == pytest.approx(j0, rel=1e-13, abs=1e-14)
    assert special.j1(x) == pytest.approx(j1, rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("row", REF["erf"], ids=lambda r: f"x={r[0]:g}")
def test_erf_against_reference(row):
    x, e, ec = row
    assert special.erf(x) == pytest.approx(e, rel=1e-14, abs=1e-15)
    assert special.erfc(x) == pytest.approx(ec, rel=1e-13, abs=1e-300)


def test_scalar_in_scalar_out():
    assert isinstance(special.j0(1.0), float)
    assert special.j1(np.array([0.5, 2.0])).shape == (2,)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-60, max_value=60, allow_nan=False))
def test_parity(x):
    assert special.j0(-x) == special.j0(x)
    assert special.j1(-x) == -special.j1(x)
    assert special.erf(-x) == -special.erf(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.05, max_value=80, allow_nan=False))
def test_wronskian_like_recurrence(x):
    # J0' = -J1 checked by a central difference
    h = 1e-5 * max(1.0, x)
    d = (special.j0(x + h) - special.j0(x - h)) / (2 * h)
    assert d == pytest.approx(-special.j1(x), abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-6, max_value=6, allow_nan=False))
def test_erf_plus_erfc_is_one(x):
    assert special.erf(x) + special.erfc(x) == pytest.approx(1.0, abs=2e-16 * 4)
