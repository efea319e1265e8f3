"""Band operators on Fourier modes: products and adjoints against dense matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fourier
from formalkp.bandop import BandOperator, ClassViolation, analytic_symbol, op_adjoint, op_build, op_mul
from formalkp.fourier import FourierPoly
from formalkp.scalar import QI
from formalkp.symbol import residues
from formalkp.zeta import res_zeta

WIN = range(-6, 7)


@st.composite
def band_ops(draw, allow_W: bool = True, finite: bool = True):
    mono = {}
    for _ in range(draw(st.integers(1, 3))):
        key = (draw(st.integers(0, 2)), draw(st.integers(0, 1)), draw(st.integers(0, 1)) if allow_W else 0)
        mono[key] = draw(fourier(band=2))
    corr = {}
    if finite and draw(st.booleans()):
        corr[(draw(st.integers(-2, 2)), draw(st.integers(-2, 2)))] = draw(st.integers(-3, 3))
    return BandOperator(mono, corr)


def _dense(A, rows, cols):
    return np.array([[A.entry(r, c)[0, 0] for c in cols] for r in rows], dtype=object)


@settings(max_examples=40)
@given(band_ops(allow_W=False), band_ops())
def test_product_matches_dense_matrices(X, Y):
    """Entries of X Y on a window equal the matrix product over all intermediate modes."""
    P = op_mul(X, Y)
    mids = range(-12, 13)
    lhs = _dense(P, WIN, WIN)
    rhs = _dense(X, WIN, mids).dot(_dense(Y, mids, WIN))
    assert all(a == b for a, b in zip(lhs.flat, rhs.flat))


def _assert_adjoint(X):
    Z = op_adjoint(X)
    for r in WIN:
        for c in WIN:
            assert Z.entry(r, c)[0, 0] == X.entry(c, r)[0, 0].conjugate()


@settings(max_examples=40)
@given(band_ops(allow_W=False))
def test_adjoint_is_conjugate_transpose(X):
    _assert_adjoint(X)


@settings(max_examples=20)
@given(band_ops(allow_W=False), st.integers(-3, 3), st.integers(-3, 3))
def test_adjoint_with_constant_W_term(X, a, b):
    """W-bearing monomials with constant coefficients stay in the class under adjoints."""
    Wc = BandOperator({(1, 0, 1): FourierPoly({0: QI(a, b)})})
    _assert_adjoint(X + Wc)


def test_adjoint_of_nonconstant_W_term_is_rejected():
    # (m W)^* = W m^*, a W factor followed by a non-constant multiplication
    X = BandOperator({(0, 0, 1): FourierPoly({1: 1})})
    with pytest.raises(ClassViolation):
        op_adjoint(X)


def test_basic_relations():
    e, one = op_build("eps"), op_build("1")
    assert op_mul(e, e) == one
    m = FourierPoly({1: 2, -2: QI(0, 1)})
    Dm = op_mul(op_build("D"), BandOperator.mult(m))
    assert Dm == BandOperator.monomial(m, 1) + BandOperator.mult(m.derive(1).scale(QI(0, -1)))
    # D = -i d/dx
    assert op_build("dx") == op_build("i*D")
    # eps and W fix the constant mode
    e0 = {0: np.array([[QI(1)]], dtype=object)}
    assert e.apply(e0)[0][0, 0] == 1 and op_build("W").apply(e0)[0][0, 0] == 1
    # [eps, e^{ix}] is finitely supported
    C = op_mul(e, op_build("m{1:1}")) - op_mul(op_build("m{1:1}"), e)
    assert C.is_finite() and not C.is_zero()


def test_expression_language():
    A = op_build("m{1: [[1,0]]} * D^2 * eps")
    assert set(A.monomials) == {(2, 1, 0)}
    B = op_build("(1/2 + D) * (D - 1/2)")
    assert B == op_build("D^2 - 1/4")
    M = op_build("m{0: [[1, 2], [3, 4]]}", dim=2)
    assert M.dim == 2
    with pytest.raises(ValueError):
        op_build("D +* 2")


def test_two_W_factors_rejected():
    with pytest.raises(ClassViolation):
        op_build("W*W")
    with pytest.raises(ClassViolation):
        op_mul(op_build("W"), op_build("m{1:1}"))


@settings(max_examples=30)
@given(band_ops(allow_W=False, finite=False), band_ops(allow_W=False, finite=False))
def test_analytic_symbol_leading_grade_is_multiplicative(X, Y):
    P = op_mul(X, Y)
    a, b, ab = analytic_symbol(X), analytic_symbol(Y), analytic_symbol(P)
    if a.is_zero() or b.is_zero() or ab.is_zero():
        return
    top = a.top + b.top
    pa, ma = a.grade(a.top)
    pb, mb = b.grade(b.top)
    assert ab.grade(top) == (pa.mul(pb), ma.mul(mb))


@given(fourier(band=2), st.integers(0, 1))
def test_zeta_residue_matches_symbol_residue(m, q):
    A = op_mul(BandOperator.mult(m), op_build("eps^%d * W" % q))
    assert res_zeta(A) == residues(analytic_symbol(A)).res
