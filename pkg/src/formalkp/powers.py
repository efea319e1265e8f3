"""Complex powers of scalar formal symbols with constant unit leading coefficient.

For ``L = c xi^alpha (1 + lower grades)`` on one half line, the relative
coefficients ``m_j(s)`` of ``L^s = c^s xi^(s alpha) sum_j m_j(s) xi^(-j)`` are
polynomials of degree at most ``j`` in ``s``: differentiating ``L^s`` in ``s``
gives ``m_j'(s)`` as an ``s``-independent linear combination of ``m_i(s)`` with
``i < j``.  So ``m_j(s)`` is fixed by its values at ``s = 0, 1, ..., j``, which are
coefficients of iterated compositions, and Newton's forward-difference formula
evaluates it at any complex ``s`` exactly.  Integer ``s`` reproduces iterated
composition by construction, and the group law holds identically in ``s``.

The branch of ``c^s`` is fixed by a phase: ``c = exp(i pi theta)``.  For a
``(d/dx)^alpha``-type leading term the minus component carries
``exp(i pi alpha)``, for ``|D|^alpha`` it carries 1.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .fourier import FourierPoly
from .scalar import QI, as_scalar
from .symbol import FormalSymbol, sym_compose

__all__ = ["complex_power", "leading_phase", "exp_i_pi"]


def leading_phase(c, exact: bool):
    """Phase ``theta`` (in half turns) of a unit constant ``c`` in {1, i, -1, -i}."""
    table = {(1, 0): 0, (0, 1): Fraction(1, 2), (-1, 0): 1, (0, -1): Fraction(-1, 2)}
    z = complex(c)
    key = (round(z.real), round(z.imag))
    if key in table and abs(z - complex(*key)) < (0 if exact else 1e-12) + 1e-300:
        return table[key]
    raise ValueError(f"non-unit leading coefficient {c}; pass the branch phase explicitly")


def exp_i_pi(t, exact: bool):
    """``exp(i pi t)``; exact when ``t`` is a half-integer multiple."""
    if exact:
        t = QI.coerce(t)
        if t.is_real():
            q = t.real * 2
            if q.denominator == 1:
                return [QI(1), QI(0, 1), QI(-1), QI(0, -1)][int(q.numerator) % 4]
        raise ValueError(f"exp(i pi * {t}) is not a Gaussian rational; use float mode")
    return cmath.exp(1j * cmath.pi * complex(t))


def _binom(s, i: int, exact: bool):
    out = QI(1) if exact else 1 + 0j
    for r in range(i):
        out = out * (s - r) / (r + 1)
    return out


def _unit_leading(f: FourierPoly):
    if not f.is_constant():
        raise ValueError("leading coefficient must be constant")
    c = f.mean()[0, 0]
    if (c.is_zero() if isinstance(c, QI) else c == 0):
        raise ValueError("leading coefficient vanishes")
    return c


def complex_power(L: FormalSymbol, s, depth: int | None = None, phase=None) -> FormalSymbol:
    """``L^s`` for a dim-1 symbol with constant unit leading coefficients.

    Parameters
    ----------
    L : FormalSymbol
        ``c_+ xi^alpha + ...`` on the plus side and ``c_- |xi|^alpha + ...`` on the minus side.
    s : scalar
        Complex exponent (Gaussian rational in exact mode).
    depth : int, optional
        Lowest grade to compute; required when ``L`` is complete.
    phase : (theta_plus, theta_minus), optional
        Branch data ``c_pm = exp(i pi theta_pm)``; inferred for ``c`` in {1, i, -1, -i}.

    Returns
    -------
    FormalSymbol
        Offset ``s alpha``; relative window equal to the window of ``L`` (or to ``depth``).
    """
    if L.dim != 1:
        raise ValueError("complex_power is implemented for scalar (dim 1) symbols")
    if L.is_zero():
        raise ValueError("complex power of the zero symbol")
    exact = L.exact
    s = as_scalar(s, exact)
    top = L.top
    alpha = L.offset + top
    cp, cm = (_unit_leading(f) for f in L.grade(top))
    if phase is None:
        phase = (leading_phase(cp, exact), leading_phase(cm, exact))
    # relative window size
    J = None if L.depth is None else top - L.depth
    M_top = s * alpha
    if depth is not None:
        # the result's leading grade as a real number decides how many lower grades are wanted
        lead_real = float(complex(M_top).real)
        want = int(round(lead_real - depth)) if abs(lead_real - round(lead_real)) < 1e-12 else int(lead_real - depth)
        J = want if J is None else min(J, want)
    if J is None:
        raise ValueError("complex_power of a complete symbol needs an explicit depth")
    if J < 0:
        return FormalSymbol(dim=1, offset=M_top, depth=0, exact=exact)

    # normalized base: unit leading coefficient on each side
    inv_p = (QI(1) / cp) if exact else 1 / complex(cp)
    inv_m = (QI(1) / cm) if exact else 1 / complex(cm)
    base = L.map_coeffs(lambda f: f.scale(inv_p), which="plus").map_coeffs(lambda f: f.scale(inv_m), which="minus")

    # powers P_n, n = 0..J, and their relative coefficients
    one = FormalSymbol.identity(1, exact)
    rel = []  # rel[n][j] = (plus, minus) relative coefficient j of base^n
    P = one
    for n in range(J + 1):
        t = P.top
        rel.append([P.grade(t - j) for j in range(J + 1)])
        if n < J:
            P = sym_compose(P, base, depth=P.top + top - J)

    zero = FourierPoly.zero(1, exact)
    cps = exp_i_pi(phase[0] * s if not exact else QI.coerce(phase[0]) * s, exact)
    cms = exp_i_pi(phase[1] * s if not exact else QI.coerce(phase[1]) * s, exact)
    grades = {}
    for j in range(J + 1):
        accp, accm = zero, zero
        for i in range(j + 1):
            # i-th forward difference at 0 of the node values rel[n][j]
            dp, dm = zero, zero
            for r in range(i + 1):
                c = _comb_signed(i, r)
                p, m = rel[r][j]
                dp = dp + p.scale(c)
                dm = dm + m.scale(c)
            b = _binom(s, i, exact)
            accp = accp + dp.scale(b)
            accm = accm + dm.scale(b)
        grades[-j] = (accp.scale(cps), accm.scale(cms))
    return FormalSymbol(grades, dim=1, offset=M_top, depth=-J, exact=exact)


def _comb_signed(i: int, r: int) -> int:
    from math import comb
    return (-1) ** (i - r) * comb(i, r)
