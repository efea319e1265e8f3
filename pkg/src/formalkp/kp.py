"""KP hierarchy by weight-graded Mulase factorization.

Given an initial operator ``L0`` the solver forms ``U = prod_k exp(t_k L0^k)``,
factorizes ``U = S^{-1} Y`` with ``S`` in ``1 + (negative grades)`` and ``Y``
differential, and returns ``L = S L0 S^{-1}``.  The variants reuse the same
factorization:

* ``classical``: ``L0 = d/dx + (negative grades)`` in the odd embedding;
* ``fcl``: ``L0`` the image of such an operator under ``phi_map(lam, mu, .)``;
* ``epsilon``: the ``fcl`` solution with ``t_k -> (-1)^k t_k`` on the minus side,
  which solves ``dL/dt_k = eps^k [(L^k)_D, L]``;
* ``h``: the h-graded rescaling ``t_n -> h^n t_n``, ``L -> h L``;
* ``complex``: ``L0`` of complex order ``alpha`` with flows generated by
  ``M_k = L0^{k/alpha}``.

Every stored symbol carries its own exact window, so correctness below the
requested depth is never claimed silently.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Sequence

from .fourier import FourierPoly
from .powers import complex_power
from .scalar import QI
from .symbol import FormalSymbol, parity_class, phi_map, residues, sym_compose
from .timeseries import TimeSeriesOperator, _splits, multi_indices, ts_compose, weight

__all__ = [
    "KPSolution",
    "ResidualReport",
    "kp_initial_exponential",
    "mulase_factorize",
    "kp_solve",
    "kp_fcl_solve",
    "kp_complex_solve",
    "hkp_from_classical",
    "kp_residual",
    "sato_wilson_residual",
    "kp_conserved",
    "coefficient_table_csv",
]


@dataclass
class KPSolution:
    """Dressing data ``(S, Y)`` and the evolved operator ``L`` on a weight/grade window.

    ``powers`` holds the flow generators ``M_k`` (``L0^k`` for integer order,
    ``L0^{k/alpha}`` for complex order); ``L_from_Y`` is ``Y L0 Y^{-1}``.
    """

    S: TimeSeriesOperator
    Y: TimeSeriesOperator
    L: TimeSeriesOperator
    L0: FormalSymbol
    w_max: int
    depth: int
    variant: str = "classical"
    meta: dict = field(default_factory=dict)
    powers: dict = field(default_factory=dict)
    L_from_Y: TimeSeriesOperator | None = None
    twisted: bool = False

    @property
    def n_times(self) -> int:
        return self.L.n_times

    def bundle(self) -> dict:
        return {
            "variant": self.variant,
            "w_max": self.w_max,
            "depth": self.depth,
            "meta": {k: v for k, v in self.meta.items()},
            "S": self.S.truncate_depth(self.depth).to_json(),
            "Y": self.Y.to_json(),
            "L": self.L.truncate_depth(self.depth).to_json(),
        }


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of a residual check on the certified window."""

    k: int
    max_abs: float
    exact_zero: bool
    worst: tuple | None
    checked_terms: int
    window_weight: int
    window_depth: int

    def ok(self, tol: float = 0.0) -> bool:
        return self.exact_zero if tol == 0.0 else self.max_abs <= tol


# ---------------------------------------------------------------------- construction
def _powers(L0: FormalSymbol, n: int, depth: int) -> list[FormalSymbol]:
    out = [FormalSymbol.identity(L0.dim, L0.exact)]
    for _ in range(n):
        out.append(sym_compose(out[-1], L0, depth))
    return out


def kp_initial_exponential(L0: FormalSymbol, w_max: int, depth: int,
                           generators: dict[int, FormalSymbol] | None = None) -> TimeSeriesOperator:
    """``U = prod_k exp(t_k M_k)`` on weights ``<= w_max`` with ``M_k = L0^k`` by default.

    The generators must commute; then ``U_m = prod_k M_k^{m_k} / m_k!``.
    """
    _check_leading(L0)
    n = w_max
    if generators is None:
        pw = _powers(L0, w_max, depth)
        gens = {k: pw[k] for k in range(1, n + 1)}
    else:
        gens = generators
    one = FormalSymbol.identity(L0.dim, L0.exact)
    # cache powers of each generator
    gpow = {k: [one] for k in gens}
    terms = {}
    for m in multi_indices(w_max, n):
        acc = one
        denom = 1
        for k, e in enumerate(m, start=1):
            if e == 0:
                continue
            while len(gpow[k]) <= e:
                gpow[k].append(sym_compose(gpow[k][-1], gens[k], depth))
            acc = sym_compose(acc, gpow[k][e], depth) if acc is not one else gpow[k][e]
            denom *= factorial(e)
        terms[m] = acc if denom == 1 else acc.scale(QI(1) / denom if L0.exact else 1.0 / denom)
    return TimeSeriesOperator(terms, n, w_max, L0.dim, L0.exact)


def _check_leading(L0: FormalSymbol):
    if L0.is_zero():
        raise ValueError("initial operator is zero")
    p, m = L0.grade(L0.top)
    if not (p.is_constant() and m.is_constant()) or p.is_zero() and m.is_zero():
        raise ValueError("initial operator must have a constant leading coefficient")


def mulase_factorize(U: TimeSeriesOperator, depth: int | None = None,
                     order: Sequence[tuple] | None = None) -> tuple[TimeSeriesOperator, TimeSeriesOperator]:
    """Factor ``U = S^{-1} Y`` weight by weight.

    ``R_m = U_m + sum S_a U_b`` over proper splits ``a + b = m``; then
    ``S_m = -(R_m)_S`` and ``Y_m = (R_m)_D``.  ``order`` may list the nonzero
    multi-indices in any order compatible with weight (each index after all of
    its proper sub-indices); the exact result does not depend on it.
    """
    n = U.n_times
    zero = (0,) * n
    one = FormalSymbol.identity(U.dim, U.exact)
    if not U[zero].agrees(one):
        raise ValueError("weight-0 part of U must be the identity")
    idx = [m for m in multi_indices(U.w_max, n) if m != zero] if order is None else list(order)
    S = {zero: one}
    Y = {zero: one}
    done = {zero}
    for m in idx:
        for a, b in _splits(m):
            if a != m and a not in done:
                raise ValueError(f"order processes {m} before its sub-index {a}")
        R = U[m]
        for a, b in _splits(m):
            if a == zero or b == zero or a not in S or b not in U:
                continue
            R = R + sym_compose(S[a], U[b], depth)
        Sm = -R.s_part()
        Ym = R.d_part()
        if not Sm.is_zero() or Sm.depth is not None:
            S[m] = Sm
        if not Ym.is_zero():
            Y[m] = Ym
        done.add(m)
    return (TimeSeriesOperator(S, n, U.w_max, U.dim, U.exact),
            TimeSeriesOperator(Y, n, U.w_max, U.dim, U.exact))


def _conjugate(G: TimeSeriesOperator, L0: FormalSymbol, depth: int) -> TimeSeriesOperator:
    """``G L0 G^{-1}`` on the window."""
    L0t = TimeSeriesOperator.constant(L0, G.n_times, G.w_max)
    return ts_compose(ts_compose(G, L0t, depth), G.inverse(depth), depth)


def _working_depth(depth: int, w_max: int, top: int) -> int:
    # L^k brackets lose up to k grades, S o U products lose up to w grades
    return depth - 2 * w_max - top - 1


def _solve(L0: FormalSymbol, w_max: int, depth: int, variant: str, generators=None, meta=None,
           order=None, with_Y: bool = True) -> KPSolution:
    if w_max < 1:
        raise ValueError("w_max must be at least 1")
    top = max(L0.top, 1)
    wd = _working_depth(depth, w_max, top)
    U = kp_initial_exponential(L0, w_max, wd, generators)
    S, Y = mulase_factorize(U, wd, order)
    Ldepth = depth - w_max - 1 - top
    L = _conjugate(S, L0, Ldepth)
    LY = _conjugate(Y, L0, Ldepth) if with_Y else None
    claim = L.min_depth_claim()
    if claim is not None and claim > depth - w_max:
        raise RuntimeError(f"internal window too shallow: L known only down to grade {claim}")
    return KPSolution(S=S, Y=Y, L=L, L0=L0, w_max=w_max, depth=depth, variant=variant,
                      meta=dict(meta or {}), L_from_Y=LY,
                      powers=dict(generators) if generators else {})


def kp_solve(L0: FormalSymbol, w_max: int, depth: int, variant: str = "classical",
             order: Sequence[tuple] | None = None) -> KPSolution:
    """Solve ``dL/dt_k = [(L^k)_D, L]``, ``L(0) = L0``, for ``k <= w_max``.

    ``variant="classical"`` requires an odd-class ``L0`` with leading ``d/dx``.
    """
    if variant == "classical":
        L0._require_integer_offset("classical KP")
        if L0.top != 1:
            raise ValueError("classical initial operator must have top grade 1")
        p, m = L0.grade(1)
        if p != FourierPoly.identity(L0.dim, L0.exact) or m != -p:
            raise ValueError("classical initial operator must have leading term d/dx")
        if parity_class(L0) != "odd":
            raise ValueError("classical initial operator must be odd class")
    return _solve(L0, w_max, depth, variant, order=order, meta={"L0": L0.to_json()})


def kp_fcl_solve(L0_odd: FormalSymbol, lam, mu, w_max: int, depth: int, twisted: bool = False) -> KPSolution:
    """KP on the two-component algebra with ``L0 = phi_map(lam, mu, L0_odd)``.

    Requires ``lam`` and ``mu`` both nonzero.  With ``twisted`` the solution of
    ``dL/dt_k = eps^k [(L^k)_D, L]`` is returned.
    """
    zero = lambda c: (QI.coerce(c).is_zero() if L0_odd.exact else complex(c) == 0)
    if zero(lam) or zero(mu):
        raise ValueError("well-posedness needs (lambda, mu) in (C*)^2: both parameters must be nonzero")
    L0 = phi_map(lam, mu, L0_odd)
    meta = {"lambda": str(lam), "mu": str(mu), "twisted": twisted}
    sol = _solve(L0, w_max, depth, "fcl", meta=meta)
    if twisted:
        sol = _twist(sol)
    return sol


def _twist_ts(T: TimeSeriesOperator) -> TimeSeriesOperator:
    def f(m, A):
        if weight(m) % 2 == 0:
            return A
        return A.map_coeffs(lambda g: -g, which="minus")
    return T.map(f)


def _twist(sol: KPSolution) -> KPSolution:
    return KPSolution(S=_twist_ts(sol.S), Y=_twist_ts(sol.Y), L=_twist_ts(sol.L), L0=sol.L0,
                      w_max=sol.w_max, depth=sol.depth, variant="epsilon", meta=dict(sol.meta),
                      L_from_Y=_twist_ts(sol.L_from_Y) if sol.L_from_Y is not None else None,
                      twisted=True)


def kp_complex_solve(L0: FormalSymbol, w_max: int, depth: int, kind: str | None = None,
                     phase=None) -> KPSolution:
    """KP flows generated by ``M_k = L0^{k/alpha}`` for ``L0`` of complex order ``alpha``.

    ``kind`` fixes the branch of the leading coefficient: ``"d"`` for
    ``(d/dx)^alpha`` leading data (minus side ``exp(i pi alpha)``), ``"absd"``
    for ``|D|^alpha`` (minus side 1).  The generators have integer order ``k``.
    """
    alpha = L0.offset + L0.top
    if phase is None and kind is not None:
        if kind == "d":
            phase = (0, alpha)
        elif kind == "absd":
            phase = (0, 0)
        else:
            raise ValueError(f"unknown leading kind {kind!r}")
    # generators have integer order k, so they need the classical working window
    wd = _working_depth(depth, w_max, 1)
    if L0.depth is not None and 1 - (L0.top - L0.depth) > wd:
        raise ValueError(f"initial window too shallow: need relative depth {1 - wd}, "
                         f"have {L0.top - L0.depth}")
    gens = {}
    for k in range(1, w_max + 1):
        s = (QI(k) / alpha) if L0.exact else k / complex(alpha)
        gens[k] = complex_power(L0, s, depth=wd, phase=phase)
    meta = {"alpha": str(alpha), "kind": kind}
    sol = _solve(L0, w_max, depth, "complex", generators=gens, meta=meta, with_Y=False)
    return sol


def hkp_from_classical(sol: KPSolution, depth: int | None = None) -> KPSolution:
    """h-graded view of a classical solution: ``t_n -> h^n t_n``, ``L -> h L``.

    The h-degree of the ``t^m`` term is ``weight(m)`` for ``S`` and ``Y`` and
    ``weight(m) + 1`` for ``L``.  Membership in the h-graded class (every
    grade-``g`` coefficient has h-degree ``>= g``) is verified on the window.
    """
    depth = sol.depth if depth is None else depth
    S = TimeSeriesOperator(sol.S.terms, sol.n_times, sol.w_max, sol.S.dim, sol.S.exact, h_offset=0)
    Y = TimeSeriesOperator(sol.Y.terms, sol.n_times, sol.w_max, sol.Y.dim, sol.Y.exact, h_offset=0)
    L = TimeSeriesOperator(sol.L.terms, sol.n_times, sol.w_max, sol.L.dim, sol.L.exact, h_offset=1)
    for name, T in (("S", S), ("Y", Y), ("L", L)):
        claim = T.min_depth_claim()
        if claim is not None and claim > depth:
            raise ValueError(f"window too shallow to verify h-membership of {name} at depth {depth}")
        bad = h_membership_violations(T)
        if bad:
            raise RuntimeError(f"h-membership fails for {name} at {bad[0]}")
    return KPSolution(S=S, Y=Y, L=L, L0=sol.L0, w_max=sol.w_max, depth=depth, variant="h",
                      meta=dict(sol.meta, h_scaling=True), L_from_Y=sol.L_from_Y)


def h_membership_violations(T: TimeSeriesOperator) -> list[tuple]:
    """Terms whose top grade exceeds their h-degree."""
    if T.h_offset is None:
        raise ValueError("series is not h-graded")
    out = []
    for m, A in T.terms.items():
        if not A.is_zero() and A.top > weight(m) + T.h_offset:
            out.append((m, A.top, weight(m) + T.h_offset))
    return out


def h_specialize(T: TimeSeriesOperator, h) -> TimeSeriesOperator:
    """Substitute a value for ``h``: the ``t^m`` term is multiplied by ``h^(weight(m) + h_offset)``."""
    if T.h_offset is None:
        raise ValueError("series is not h-graded")
    return TimeSeriesOperator({m: A.scale(h ** (weight(m) + T.h_offset)) for m, A in T.terms.items()},
                              T.n_times, T.w_max, T.dim, T.exact)


# ---------------------------------------------------------------------- verification
def _ts_power(L: TimeSeriesOperator, k: int, depth: int, w: int) -> TimeSeriesOperator:
    P = L.truncate_weight(w)
    out = P
    for _ in range(k - 1):
        out = ts_compose(out, P, depth, w)
    return out


def _flow_generator(sol: KPSolution, k: int, depth: int, w: int) -> TimeSeriesOperator:
    """``L^k`` (or ``S M_k S^{-1}`` for complex order) on weights ``<= w``."""
    if sol.variant == "complex":
        S = sol.S.truncate_weight(w)
        Mk = TimeSeriesOperator.constant(sol.powers[k], sol.n_times, w)
        return ts_compose(ts_compose(S, Mk, depth), S.inverse(depth), depth)
    return _ts_power(sol.L, k, depth, w)


def _eps_power(sol: KPSolution, k: int):
    if sol.twisted and k % 2 == 1:
        return FormalSymbol.eps(sol.L.dim, sol.L.exact)
    return None


def _report(k, diff: TimeSeriesOperator, w: int, depth: int) -> ResidualReport:
    worst, best = None, 0.0
    exact_zero = True
    n = 0
    for m in multi_indices(w, diff.n_times):
        A = diff[m].truncate(depth)
        n += 1
        if not A.is_zero():
            exact_zero = False
            v = A.max_abs()
            if v >= best:
                best, worst = v, (m, max(A.grades))
    return ResidualReport(k=k, max_abs=best, exact_zero=exact_zero, worst=worst, checked_terms=n,
                          window_weight=w, window_depth=depth)


def _with_depth_check(T: TimeSeriesOperator, depth: int, what: str):
    claim = T.min_depth_claim()
    if claim is not None and claim > depth:
        raise RuntimeError(f"{what} is only known down to grade {claim}, above the window {depth}")


def kp_residual(sol: KPSolution, k: int, L: TimeSeriesOperator | None = None) -> ResidualReport:
    """``dL/dt_k - eps^k [(L^k)_D, L]`` on weights ``<= w_max - k`` and grades ``>= depth``.

    ``L`` overrides the stored operator (used to test perturbed data).
    """
    if not 1 <= k <= sol.n_times:
        raise ValueError(f"time t_{k} is not active")
    depth, w = sol.depth, sol.w_max - k
    if L is not None:
        sol = KPSolution(**{**sol.__dict__, "L": L})
    lhs = sol.L.derivative_t(k)
    if w < 0:
        return _report(k, lhs, -1, depth)
    gen = _flow_generator(sol, k, depth - 1, w)
    P = gen.map(lambda m, A: A.d_part())
    Lw = sol.L.truncate_weight(w)
    rhs = ts_compose(P, Lw, depth) - ts_compose(Lw, P, depth)
    e = _eps_power(sol, k)
    if e is not None:
        rhs = rhs.map(lambda m, A: sym_compose(e, A))
    diff = lhs.truncate_weight(w) - rhs
    _with_depth_check(diff.truncate_weight(w), depth, "residual")
    return _report(k, diff, w, depth)


def sato_wilson_residual(sol: KPSolution, k: int, S: TimeSeriesOperator | None = None) -> ResidualReport:
    """``dS/dt_k + eps^k (L^k)_S S`` on the certified window."""
    depth, w = sol.depth, sol.w_max - k
    if S is not None:
        sol = KPSolution(**{**sol.__dict__, "S": S})
    lhs = sol.S.derivative_t(k)
    gen = _flow_generator(sol, k, depth - 1, w)
    Pm = gen.map(lambda m, A: A.s_part())
    rhs = ts_compose(Pm, sol.S.truncate_weight(w), depth)
    e = _eps_power(sol, k)
    if e is not None:
        rhs = rhs.map(lambda m, A: sym_compose(e, A))
    diff = lhs.truncate_weight(w) + rhs
    return _report(k, diff, w, depth)


def kp_conserved(sol: KPSolution, k: int) -> dict[tuple, object]:
    """Adler trace of ``L^k`` as a series in the times; nonzero only at weight 0 for solutions."""
    if sol.variant not in ("classical", "h"):
        raise ValueError("conserved Adler traces are defined for the odd (classical) variant")
    Lk = _ts_power(sol.L, k, -1, sol.w_max)
    out = {}
    for m in multi_indices(sol.w_max, sol.n_times):
        A = Lk[m]
        if A.depth is not None and A.depth > -1:
            raise RuntimeError("grade -1 outside the window")
        p, mm = A.grade(-1)
        mean = p.mean()
        t = mean[0, 0]
        for i in range(1, A.dim):
            t = t + mean[i, i]
        out[m] = t
    return out


def coefficient_table_csv(T: TimeSeriesOperator, grade: int, component: str = "plus") -> str:
    """CSV rows ``multi_index, weight, frequency, re, im`` for one grade of a series."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["multi_index", "weight", "frequency", "re", "im"])
    for m in multi_indices(T.w_max, T.n_times):
        p, mm = T[m].grade(grade)
        f = p if component == "plus" else mm
        for n, c in sorted(f.coeffs.items()):
            v = c[0, 0]
            if isinstance(v, QI):
                re, im = str(v.real), str(v.imag)
            else:
                re, im = repr(v.real), repr(v.imag)
            w.writerow([" ".join(map(str, m)), weight(m), n, re, im])
    return buf.getvalue()
