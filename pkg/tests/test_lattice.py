"""Parallel transport, simplex holonomy matrices and the discrete curvature estimator."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg

from formalkp.lattice import (PolyForm, Triangulation, curvature_estimate, discretize_connection, loop_holonomy,
                              refine, refinement_sweep, simplex_holonomy, transport)
from formalkp.pc import PCMatrix, gauge_act, pc_is_consistent

N = np.array([[0, 1], [0, 0]])
FLAT_GL2 = PolyForm({(0, 0): [[1, 0], [0, 0]], (0, 1): [[0, 1], [0, 0]]}, {(0, 0): [[0, 1], [0, 0]]}, 2)
GENERIC = PolyForm({(0, 0): [[0.2, 1], [0.3, -0.1]], (1, 0): [[0, 0.5], [0, 0]]},
                   {(0, 1): [[0.1, 0], [0.4, 0.2]], (0, 0): [[0, 0.3], [-0.2, 0]]}, 2)
SQUARE = Triangulation([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)], [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)])


def _ivp_transport(theta, p, q):
    """Reference: h' = -theta(gamma(t)) gamma'(t) h with a tight adaptive integrator."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    v = q - p
    d = theta.dim

    def f(t, y):
        P, Q = theta.components(*(p + t * v))
        return (-(P * v[0] + Q * v[1]) @ y.reshape(d, d)).ravel()

    sol = scipy.integrate.solve_ivp(f, (0, 1), np.eye(d, dtype=complex).ravel(), method="DOP853",
                                    rtol=1e-13, atol=1e-13)
    return sol.y[:, -1].reshape(d, d)


@pytest.mark.parametrize("p,q", [((0, 0), (1, 1)), ((0.3, -0.2), (1.1, 0.4)), ((1, 0), (0, 1))])
def test_transport_matches_reference_integrator(p, q):
    assert np.allclose(transport(GENERIC, p, q, tol=1e-11), _ivp_transport(GENERIC, p, q), atol=1e-9)


def test_abelian_transport_closed_form():
    theta = PolyForm({(0, 1): [[1]]}, {}, 1)  # y dx
    assert abs(transport(theta, (0, 0), (1, 1))[0, 0] - math.exp(-0.5)) < 1e-12


def test_stokes_on_triangle():
    theta = PolyForm({(0, 1): [[1]]}, {}, 1)
    tri = Triangulation([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    H = loop_holonomy(discretize_connection(tri, theta, tol=1e-12), (0, 1, 2))
    # h' = -theta h around the counter-clockwise boundary: exp(-oint y dx) = exp(area)
    assert abs(H[0, 0] - math.exp(0.5)) < 1e-8


def test_flat_abelian_form_gives_consistent_matrix():
    # d(x^2 y + x) = (2xy + 1) dx + x^2 dy
    theta = PolyForm({(1, 1): [[2]], (0, 0): [[1]]}, {(2, 0): [[1]]}, 1)
    A = simplex_holonomy(theta, [(0, 0), (1, 0), (0, 1), (0.4, 0.7)], tol=1e-12)
    assert pc_is_consistent(A, 1e-12)
    field = discretize_connection(SQUARE, theta, tol=1e-12)
    for s in SQUARE.simplices:
        assert np.allclose(loop_holonomy(field, s), 1, atol=1e-12)


def test_flat_gl2_form():
    assert np.allclose(FLAT_GL2.curvature(0.3, 0.2), 0)
    A = simplex_holonomy(FLAT_GL2, [(0, 0), (1, 0), (0, 1), (0.4, 0.7)])
    assert pc_is_consistent(A, 1e-6)
    field = discretize_connection(SQUARE, FLAT_GL2)
    for s in SQUARE.simplices:
        assert np.max(np.abs(loop_holonomy(field, s) - np.eye(2))) < 1e-6


def _poly_mul(A, B):
    out = {}
    for ka, va in A.items():
        for kb, vb in B.items():
            k = (ka[0] + kb[0], ka[1] + kb[1])
            out[k] = out.get(k, 0) + np.asarray(va) @ np.asarray(vb)
    return out


def test_gauge_covariance():
    """With g = 1 + (x^2 + xy) N the transformed form g^{-1} theta g + g^{-1} dg has a_ij -> g_i^{-1} a_ij g_j."""
    I = np.eye(2)
    gp = {(0, 0): I, (2, 0): N, (1, 1): N}
    gm = {(0, 0): I, (2, 0): -N, (1, 1): -N}
    P2 = _poly_mul(_poly_mul(gm, GENERIC.P), gp)
    Q2 = _poly_mul(_poly_mul(gm, GENERIC.Q), gp)
    P2[(1, 0)] = P2.get((1, 0), 0) + 2 * N
    P2[(0, 1)] = P2.get((0, 1), 0) + N
    Q2[(1, 0)] = Q2.get((1, 0), 0) + N
    theta2 = PolyForm(P2, Q2, 2)
    V = [(0, 0), (1, 0), (0.2, 0.9), (0.7, 0.6)]
    tol = 1e-8
    A, B = simplex_holonomy(GENERIC, V, tol), simplex_holonomy(theta2, V, tol)
    g = [I + (x * x + x * y) * N for x, y in V]
    C = gauge_act("coAd", g, A)
    err = max(np.max(np.abs(C.entries[i][j] - B.entries[i][j])) for i in range(4) for j in range(4))
    assert err <= 10 * tol


def test_curvature_estimate_first_order():
    theta = PolyForm({(0, 1): [[-0.5]]}, {(1, 0): [[0.5]]}, 1)  # F_xy = 1
    tri = refine(refine(Triangulation([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])))
    field = discretize_connection(tri, theta, tol=1e-12)
    for s in tri.simplices:
        assert abs(curvature_estimate(field, tri, s)[0, 0] + 1) < 0.1


def test_refinement_sweep_converges():
    theta = PolyForm({(0, 1): [[1]]}, {(2, 0): [[1]]}, 1)
    tri = Triangulation([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)])
    sw = refinement_sweep(tri, theta, 3)
    assert sw.order >= 1.0
    assert sw.C_interval[0] <= sw.C <= sw.C_interval[1]
    assert all(e2 < e1 for e1, e2 in zip(sw.errors, sw.errors[1:]))


def test_refine_counts():
    tri = refine(SQUARE)
    assert len(tri.simplices) == 16 and len(tri.nodes) == 13


def test_json_round_trip():
    assert PolyForm.from_json(GENERIC.to_json()).to_json() == GENERIC.to_json()
    assert Triangulation.from_json(SQUARE.to_json()).to_json() == SQUARE.to_json()


def test_degenerate_triangle_rejected():
    with pytest.raises(ValueError):
        Triangulation([(0, 0), (1, 1), (2, 2)], [(0, 1, 2)])
