"""Gaussian rationals and trigonometric polynomials against float oracles."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fourier, qi
from formalkp.fourier import FourierPoly
from formalkp.scalar import QI

XS = np.linspace(0.1, 6.0, 7)


@given(qi(), qi(), qi())
def test_qi_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if not a.is_zero():
        assert a * (QI(1) / a) == QI(1)
    assert complex(a * b) == complex(a) * complex(b) or abs(complex(a * b) - complex(a) * complex(b)) < 1e-12


@settings(max_examples=50)
@given(fourier(band=3, dim=2), fourier(band=2, dim=2))
def test_product_matches_pointwise_evaluation(f, g):
    h = f.mul(g)
    for x in XS:
        assert np.allclose(h.evaluate(x), f.evaluate(x) @ g.evaluate(x), atol=1e-12)


@settings(max_examples=50)
@given(fourier(band=3))
def test_derivative_matches_finite_difference(f):
    d = f.derive()
    for x in XS:
        fd = (f.evaluate(x + 1e-6) - f.evaluate(x - 1e-6)) / 2e-6
        assert np.allclose(d.evaluate(x), fd, atol=1e-6)


@given(fourier(band=2, dim=2))
def test_json_round_trip(f):
    assert FourierPoly.from_json(f.to_json()) == f


@given(fourier(band=2))
def test_float_mirror_agrees(f):
    g = f.to_float()
    assert not g.exact
    for x in XS:
        assert np.allclose(f.evaluate(x), g.evaluate(x))


@given(st.integers(-5, 5))
def test_scalar_shorthand_in_json(n):
    f = FourierPoly.from_json({"coeffs": {str(n): "3/2", "0": [1, -1]}})
    assert f.coeffs[n][0, 0] == (QI(3) / 2 if n else QI(1, -1))
