"""Renormalized traces, zeta residues and the Schwinger cocycle."""

import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fourier
from formalkp.bandop import BandOperator, ClassViolation, op_bracket, op_build, op_mul
from formalkp.fourier import FourierPoly
from formalkp.scalar import QI
from formalkp.symbol import FormalSymbol, residues
from formalkp.zeta import (ExactValue, curvature_theta, hermitian_defect, odd_traciality_check, pairing_hs_delta,
                           plain_trace, renorm_trace, res_zeta, schwinger_cocycle, theta_connection, theta_s,
                           zeta_at)

# ---------------------------------------------------------------------- zeta values and trace oracle


@pytest.mark.parametrize("s", [0, -1, -2, -3, -4, -5, -7])
def test_zeta_at_nonpositive_integers(s):
    v = zeta_at(s)
    assert v.is_rational()
    assert abs(complex(v) - complex(mpmath.zeta(s))) < 1e-14


def test_zeta_at_positive_odd_is_symbolic():
    v = zeta_at(3)
    assert not v.is_rational() and str(v) == "zeta(3)"


def _oracle_trace(A, cut=3):
    """Finite part of tr(A Q^{-z}) at z = 0 by direct summation of low modes plus Hurwitz tails.

    Diagonal entries for |n| >= cut are c_pm |n|^a; ``a`` and ``c_pm`` are read off the matrix.
    """
    d = {n: complex(A.entry(n, n)[0, 0]) for n in range(-cut - 2, cut + 3)}
    head = sum(d[n] for n in range(-cut + 1, cut))
    cp, cm = d[cut], d[-cut]
    ref = d[cut + 1] if abs(d[cut + 1]) > 0 else d[-cut - 1]
    base = cp if abs(cp) > 0 else cm
    if abs(base) == 0:
        return head
    a = round(float(mpmath.log(abs(ref / base)) / mpmath.log((cut + 1) / cut)))
    cp, cm = cp / cut ** a, cm / cut ** a
    if a == -1:
        tail = mpmath.euler - sum(mpmath.mpf(1) / k for k in range(1, cut))
    else:
        tail = mpmath.zeta(-a, cut)  # Hurwitz zeta: sum_{k >= cut} k^a
    return head + (cp + cm) * complex(tail)


@settings(max_examples=60)
@given(st.integers(0, 3), st.integers(0, 1), st.integers(0, 1), st.integers(-3, 3).filter(bool))
def test_renormalized_trace_matches_summation_oracle(j, q, p, c):
    A = op_build(f"{c} * D^{j} * eps^{q} * W^{p}")
    assert abs(complex(renorm_trace(A)) - _oracle_trace(A)) < 1e-12


def test_trace_values():
    assert renorm_trace(op_build("1")).is_zero()
    assert renorm_trace(op_build("eps*eps")).is_zero()
    tW = renorm_trace(op_build("W"))
    assert tW == ExactValue(QI(1), {"gamma": QI(2)}) and str(tW) == "1 + 2γ"
    assert res_zeta(op_build("W")) == 2 == residues(FormalSymbol.abs_d_inv()).res


# ---------------------------------------------------------------------- vanishing renormalized traces
rng_f = fourier(band=2)


@settings(max_examples=50)
@given(rng_f, rng_f, rng_f, rng_f)
def test_trace_identities_on_multiplications_and_vector_fields(fa, fb, fx, fy):
    a, b = BandOperator.mult(fa), BandOperator.mult(fb)
    X, Y = BandOperator.vector_field(fx), BandOperator.vector_field(fy)
    assert pairing_hs_delta(a, b).is_zero()
    assert pairing_hs_delta(X, Y).is_zero()
    assert renorm_trace(op_mul(a, X)).is_zero()
    assert renorm_trace(op_mul(X, a)).is_zero()


@st.composite
def differential(draw):
    return BandOperator({(draw(st.integers(0, 3)), 0, 0): draw(rng_f), (0, 0, 0): draw(rng_f)})


@settings(max_examples=50)
@given(differential(), differential())
def test_odd_traciality_on_differential_pairs(A, B):
    assert odd_traciality_check(A, B).is_zero()
    assert res_zeta(A) == 0


def test_odd_traciality_rejects_W_pairs():
    with pytest.raises(ClassViolation):
        odd_traciality_check(op_build("W"), op_build("D"))


# ---------------------------------------------------------------------- Schwinger cocycle
def test_schwinger_basic_value():
    assert schwinger_cocycle(op_build("m{1:1}"), op_build("m{-1:1}")) == -2


def test_schwinger_witness_on_matrices():
    E12 = BandOperator.mult(FourierPoly({1: [[0, 1], [0, 0]]}))
    E21 = BandOperator.mult(FourierPoly({-1: [[0, 0], [1, 0]]}))
    assert schwinger_cocycle(E12, E21) == -2


mat_f = fourier(band=1, dim=2)


@settings(max_examples=100)
@given(mat_f, mat_f, mat_f)
def test_cocycle_antisymmetry_and_identity(fa, fb, fc):
    a, b, c = (BandOperator.mult(f) for f in (fa, fb, fc))
    assert schwinger_cocycle(a, b) == -schwinger_cocycle(b, a)
    cyc = (schwinger_cocycle(a, op_bracket(b, c)) + schwinger_cocycle(b, op_bracket(c, a))
           + schwinger_cocycle(c, op_bracket(a, b)))
    assert cyc == 0


@settings(max_examples=50)
@given(mat_f, mat_f, mat_f)
def test_cocycle_equals_trace_of_connection(fa, fb, fc):
    w = op_build("i*eps", dim=2)
    a, b, c = (BandOperator.mult(f) for f in (fa, fb, fc))
    assert renorm_trace(theta_connection(w, a, b)).scale(QI(0, -1)) == ExactValue(schwinger_cocycle(a, b))
    assert hermitian_defect(w, a, b, c).is_zero()


def test_smoothing_connections_are_finite_rank():
    s = BandOperator.finite({(0, 0): 1, (1, -1): QI(0, 1)})
    a, b = op_build("m{1:1, -1:2}"), op_build("m{0:1, 2:1}")
    for side in ("left", "right", "bracket"):
        assert theta_s(s, a, b, side).is_finite() or side != "bracket"
    with pytest.raises(ClassViolation):
        theta_s(op_build("D"), a, b)


def test_curvature_of_multiplicative_connection():
    w = op_build("i*eps")
    a, b, c = op_build("m{1:1}"), op_build("m{-1:1}"), op_build("1")
    Om = curvature_theta(w, a, b, c)
    assert Om.is_finite()
    rand = random.Random(0)
    for _ in range(5):
        x = op_build(f"m{{{rand.randint(-2, 2)}: {rand.randint(1, 3)}}}")
        assert curvature_theta(w, x, x, c).is_zero()


def test_plain_trace_of_finite_operator():
    F = BandOperator.finite({(0, 0): 2, (3, 3): QI(1, 1), (1, 2): 5})
    assert plain_trace(F) == QI(3, 1)
    assert renorm_trace(F) == ExactValue(QI(3, 1))
