"""KP solver: factorization, residuals, flow structure and variants."""

import random

import pytest
import sympy as sp

from conftest import U1, U2, kp_initial
from formalkp.fourier import FourierPoly
from formalkp.kp import (_working_depth, h_membership_violations, h_specialize, hkp_from_classical,
                         kp_complex_solve, kp_conserved, kp_fcl_solve, kp_initial_exponential, kp_residual,
                         kp_solve, mulase_factorize, sato_wilson_residual)
from formalkp.powers import complex_power
from formalkp.scalar import QI
from formalkp.symbol import FormalSymbol, parity_class, psido, sym_compose
from formalkp.timeseries import multi_indices, ts_compose, weight

W, DEPTH = 4, -4


@pytest.fixture(scope="module")
def sol():
    return kp_solve(kp_initial(), W, DEPTH)


def test_factorization_reassembles_and_is_order_independent():
    L0 = kp_initial()
    wd = _working_depth(-4, 3, 1)
    U = kp_initial_exponential(L0, 3, wd)
    S, Y = mulase_factorize(U, wd)
    assert ts_compose(S.inverse(wd), Y, wd).truncate_depth(-4).agrees(U.truncate_depth(-4))
    idx = [m for m in multi_indices(3, 3) if weight(m) > 0]
    random.Random(3).shuffle(idx)
    idx.sort(key=weight)
    S2, Y2 = mulase_factorize(U, wd, order=idx)
    for m in S.indices():
        assert S[m] == S2[m] and S[m].depth == S2[m].depth
    for m in Y.indices():
        assert Y[m] == Y2[m]


def test_factorization_rejects_bad_order():
    L0 = kp_initial()
    U = kp_initial_exponential(L0, 2, -8)
    with pytest.raises(ValueError):
        mulase_factorize(U, -8, order=[(2, 0), (1, 0), (0, 1)])


@pytest.mark.parametrize("k", range(1, W + 1))
def test_residuals_vanish(sol, k):
    assert kp_residual(sol, k).exact_zero
    assert sato_wilson_residual(sol, k).exact_zero


def test_perturbed_solution_is_detected(sol):
    m = (0, 1, 0, 0)
    bump = FormalSymbol({-2: (FourierPoly({1: 1}), FourierPoly({1: 1}))})
    L = sol.L.map(lambda mm, A: A + bump if mm == m else A)
    r = kp_residual(sol, 2, L=L)
    assert not r.exact_zero and r.worst is not None


def test_dressing_by_S_and_Y_agree(sol):
    assert sol.L.agrees(sol.L_from_Y, DEPTH)


def test_odd_class_preserved(sol):
    one = FormalSymbol.d()
    for m, A in sol.L.terms.items():
        assert parity_class(A.truncate(DEPTH) - (one if weight(m) == 0 else FormalSymbol.zero())) == "odd"
    for m, A in sol.S.terms.items():
        assert parity_class(A) == "odd"


def test_t1_flow_is_translation(sol):
    d1 = sol.L.derivative_t(1)
    dx = sol.L.map(lambda m, A: A.derive_x()).truncate_weight(W - 1)
    assert d1.agrees(dx, DEPTH)


def test_u_t2_closed_form(sol):
    """du/dt2 = u'' + 2 u2' at t = 0, with the right side differentiated by sympy."""
    x = sp.symbols("x")

    def expr(F):
        return sum((sp.Rational(str(c[0, 0].real)) + sp.I * sp.Rational(str(c[0, 0].imag))) * sp.exp(sp.I * n * x)
                   for n, c in F.coeffs.items())

    want = sp.expand(sp.diff(expr(U1), x, 2) + 2 * sp.diff(expr(U2), x))
    got = expr(sol.L[(0, 1, 0, 0)].grade(-1)[0])
    assert sp.simplify(got - want) == 0


def test_adler_traces_conserved(sol):
    for k in (1, 2):
        c = kp_conserved(sol, k)
        assert all(v == 0 for m, v in c.items() if weight(m) > 0)
    assert kp_conserved(sol, 1)[(0,) * W] == U1.mean()[0, 0]


def test_h_variant():
    base = kp_solve(kp_initial(), 3, -3)
    h = hkp_from_classical(base)
    assert all(kp_residual(h, k).exact_zero for k in range(1, 4))
    assert not h_membership_violations(h.L) and not h_membership_violations(h.S)
    assert h_specialize(h.L, 1).agrees(base.L)


@pytest.mark.parametrize("lam,mu", [(1, 1), (2, 3), (1, -1)])
@pytest.mark.parametrize("twisted", [False, True])
def test_fcl_variants(lam, mu, twisted):
    s = kp_fcl_solve(kp_initial(), lam, mu, 3, -3, twisted=twisted)
    for k in range(1, 4):
        assert kp_residual(s, k).exact_zero
        assert sato_wilson_residual(s, k).exact_zero


def test_fcl_needs_nonzero_parameters():
    with pytest.raises(ValueError, match="both parameters must be nonzero"):
        kp_fcl_solve(kp_initial(), 1, 0, 2, -2)


def test_complex_square_instance_matches_classical():
    M = kp_initial()
    L0c = sym_compose(M, M, -20)
    solc = kp_complex_solve(L0c, 3, -4, kind="d")
    assert all(kp_residual(solc, k).exact_zero for k in range(1, 4))
    cl = kp_solve(M, 3, -6)
    assert solc.L.agrees(cl.L.compose(cl.L, -6), -4, w_max=3)


def test_complex_order_solve():
    A = sym_compose(FormalSymbol.eps(), kp_initial())
    L0 = complex_power(A, QI(1) / 2 + QI(0, 1), depth=-16, phase=(0, 0))
    s = kp_complex_solve(L0, 3, -3, kind="absd")
    assert all(kp_residual(s, k).exact_zero and sato_wilson_residual(s, k).exact_zero for k in (1, 2, 3))


def test_float_mode_residuals():
    s = kp_solve(kp_initial(exact=False), 3, -3)
    for k in range(1, 4):
        assert kp_residual(s, k).max_abs <= 1e-10
        assert sato_wilson_residual(s, k).max_abs <= 1e-10


def test_rejects_non_odd_initial_data():
    bad = psido({1: FourierPoly.identity(), -1: U1}) + FormalSymbol({-1: (FourierPoly({0: 1}), FourierPoly())})
    with pytest.raises(ValueError):
        kp_solve(bad, 2, -2)
    with pytest.raises(ValueError):
        kp_solve(psido({2: FourierPoly.identity()}), 2, -2)
