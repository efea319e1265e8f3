"""Pairwise comparison matrices: consistency, gauge orbits, indices and holonomy."""

from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formalkp.groups import GL, SO2, Affine, PosReal
from formalkp.pc import (LEFT_ORBIT_COUNTEREXAMPLE, InconsistentError, PCMatrix, consistent_from_weights,
                         distance_matrix, enumerate_pc_from_distance, gauge_act, generic_ii, graph_holonomy,
                         koczkodaj_kii, koczkodaj_triad, left_orbit_consistentize, pc_is_consistent, pc_validate,
                         ranked_kii, recover_weights)

P = PosReal()
pos = st.fractions(min_value=Fr(1, 9), max_value=9, max_denominator=9).filter(lambda x: x > 0)


@st.composite
def pos_matrix(draw, n=None):
    n = n or draw(st.integers(3, 6))
    return PCMatrix.from_upper(P, n, {(i, j): draw(pos) for i in range(n) for j in range(i + 1, n)})


@st.composite
def weights(draw, n=None):
    n = n or draw(st.integers(3, 6))
    return [draw(pos) for _ in range(n)]


def _rank_one(A: PCMatrix) -> bool:
    M = np.array([[float(x) for x in row] for row in A.entries])
    return np.linalg.matrix_rank(M, tol=1e-9) == 1


@settings(max_examples=200)
@given(weights())
def test_consistent_set_is_orbit_of_ones_posreal(lam):
    ones = consistent_from_weights(P, [P.identity()] * len(lam))
    C = gauge_act("coAd", lam, ones)
    assert pc_is_consistent(C) and C.equals(consistent_from_weights(P, lam))
    w = recover_weights(C)
    assert gauge_act("coAd", w, ones).equals(C)


@pytest.mark.parametrize("seed", range(200))
def test_consistent_set_is_orbit_of_ones_gl2(seed):
    rng = np.random.default_rng(seed)
    G = GL(2)
    n = int(rng.integers(3, 6))
    lam = [G.random(rng) for _ in range(n)]
    ones = consistent_from_weights(G, [G.identity()] * n)
    C = gauge_act("coAd", lam, ones)
    assert pc_is_consistent(C, 1e-12)
    w = recover_weights(C, 1e-12)
    assert gauge_act("coAd", w, ones).equals(C, 1e-12)


@settings(max_examples=200)
@given(pos_matrix())
def test_consistency_agrees_with_rank_one_oracle(A):
    assert pc_is_consistent(A) == _rank_one(A)
    assert (koczkodaj_kii(A) == 0) == pc_is_consistent(A)
    assert 0 <= koczkodaj_kii(A) < 1


@settings(max_examples=100)
@given(pos_matrix(), st.data())
def test_indices_are_Ad_invariant(A, data):
    g = [data.draw(pos) for _ in range(A.n)]
    assert koczkodaj_kii(gauge_act("Ad", g, A)) == koczkodaj_kii(A)


@settings(max_examples=50)
@given(st.integers(3, 5), st.data())
def test_generic_index_Ad_invariant_on_rotations(n, data):
    G = SO2()
    turn = st.fractions(min_value=0, max_value=1, max_denominator=24)
    A = PCMatrix.from_upper(G, n, {(i, j): data.draw(turn) for i in range(n) for j in range(i + 1, n)})
    g = [data.draw(turn) for _ in range(n)]
    assert abs(generic_ii(gauge_act("Ad", g, A)) - generic_ii(A)) < 1e-12
    assert (generic_ii(A) == 0) == pc_is_consistent(A)


def test_triad_value():
    assert koczkodaj_triad(Fr(2), Fr(5), Fr(3)) == Fr(1, 6)
    A = PCMatrix.from_upper(P, 3, {(0, 1): 2, (0, 2): 5, (1, 2): 3})
    assert koczkodaj_kii(A) == Fr(1, 6)


@settings(max_examples=200)
@given(pos_matrix(n=3))
def test_left_orbit_n3_constructive(A):
    r = left_orbit_consistentize(A)
    assert r.success and pc_is_consistent(gauge_act("L", r.gauge, A))


def test_left_orbit_n4_counterexample():
    A = PCMatrix.from_upper(P, 4, LEFT_ORBIT_COUNTEREXAMPLE)
    r = left_orbit_consistentize(A, n_random=300, grid=5)
    assert not r.success
    assert r.certificate["invariant_ratio"] == "33/35"
    # the ratio is unchanged along the left orbit
    for g in ([Fr(2), Fr(3), Fr(5), Fr(7)], [Fr(1, 3), Fr(4), Fr(1), Fr(9, 2)]):
        B = gauge_act("L", g, A)
        e = B.entries
        assert e[0][2] * e[1][3] / (e[0][3] * e[1][2]) == Fr(33, 35)


@pytest.mark.parametrize("n", [3, 4])
def test_distance_preimages(n):
    A = consistent_from_weights(P, [Fr(1), Fr(2), Fr(7), Fr(3, 5)][:n])
    pre = enumerate_pc_from_distance(distance_matrix(A))
    N = n * (n - 1)
    assert len(pre) == 2 ** (N // 2)
    cons = [B for B in pre if pc_is_consistent(B)]
    assert len(cons) == 2
    assert any(B.equals(A) for B in cons) and any(B.equals(A.transpose()) for B in cons)


def test_graph_holonomy_on_cycle():
    G = SO2()
    e = [["0", "1/12", None, "1/8"], ["11/12", "0", "1/6", None], [None, "5/6", "0", "1/4"],
         ["7/8", None, "3/4", "0"]]
    A = PCMatrix.from_json({"entries": e}, G)
    assert pc_validate(A).ok and not pc_is_consistent(A)
    hol = graph_holonomy(A, 0, l_max=4)
    elems = {h: L for h, L in hol}
    assert elems[Fr(0)] == 0 and elems[Fr(3, 8)] == 4 and elems[Fr(5, 8)] == 4
    r = ranked_kii(A, 0, 4)
    assert r[0] == 0 and r[2] == 0 and r[4] > 0


def test_graph_supported_consistency_uses_tree():
    A = consistent_from_weights(P, [Fr(1), Fr(2), Fr(3), Fr(5)])
    sparse = PCMatrix(P, [[x if abs(i - j) <= 1 or i == j else None for j, x in enumerate(r)]
                          for i, r in enumerate(A.entries)])
    assert pc_is_consistent(sparse)
    bad = PCMatrix.from_json({"entries": [["1", "2", "3"], ["1/2", "1", "1"], ["1/3", "1", "1"]]}, P)
    with pytest.raises(InconsistentError):
        recover_weights(bad)


def test_contravariant_variant():
    G = GL(2)
    rng = np.random.default_rng(1)
    lam = [G.random(rng) for _ in range(3)]
    C = consistent_from_weights(G, lam)
    assert pc_is_consistent(C) and not pc_is_consistent(C, variant="contravariant")
    # a_ij = lam_j lam_i^{-1} satisfies the reversed product rule
    D = PCMatrix(G, [[G.mul(lam[j], G.inv(lam[i])) for j in range(3)] for i in range(3)])
    assert pc_is_consistent(D, variant="contravariant") and not pc_is_consistent(D)
    assert recover_weights(D, variant="contravariant") is not None


def test_validation_reports_problems():
    bad = PCMatrix(P, [[Fr(1), Fr(2)], [Fr(1, 3), Fr(1)]])
    rep = pc_validate(bad)
    assert not rep.ok and "inverse" in rep.errors[0]


def test_affine_group_consistency():
    G = Affine(1)
    rng = np.random.default_rng(0)
    lam = [G.random(rng) for _ in range(4)]
    C = consistent_from_weights(G, lam)
    assert pc_is_consistent(C)
