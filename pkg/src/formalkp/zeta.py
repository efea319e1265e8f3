"""Zeta-renormalized traces and the Schwinger cocycle on band operators.

The weight is ``Q = Delta`` with ``Q^{-z} e_n = |n|^{-2z} e_n`` for ``n != 0`` and
``Q^{-z} e_0 = e_0``.  For a band operator the diagonal away from finitely many
modes is a finite sum ``c |n|^a sign(n)^b``, so

    sum_{n != 0} c |n|^{a - 2z} sign(n)^b = 2 c zeta(2z - a)  (b even), 0 (b odd),

and the renormalized trace is the finite part at ``z = 0`` after removing the
residue pole ``res / (2z)``.  Values of zeta at nonpositive integers are exact
rationals; Euler's constant and zeta at integers ``>= 2`` stay symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
import scipy.special
import sympy

from .bandop import BandOperator, ClassViolation, op_adjoint, op_bracket, op_mul
from .fourier import FourierPoly
from .scalar import QI, as_scalar, is_zero, scalar_to_json

__all__ = [
    "ExactValue",
    "DiagonalSymbol",
    "diagonal_symbol",
    "zeta_at",
    "renorm_trace",
    "res_zeta",
    "plain_trace",
    "schwinger_cocycle",
    "pairing_hs_delta",
    "theta_connection",
    "theta_pseudo_hermitian",
    "theta_s",
    "curvature_theta",
    "hermitian_defect",
    "odd_traciality_check",
]


# ---------------------------------------------------------------------- exact values
@dataclass(frozen=True)
class ExactValue:
    """``rational + sum_tag coeff * tag`` with tags such as ``"gamma"`` or ``"zeta(3)"``."""

    rational: object = QI(0)
    tags: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def of(cls, x) -> "ExactValue":
        return x if isinstance(x, ExactValue) else cls(x, {})

    def _clean(self) -> "ExactValue":
        return ExactValue(self.rational, {k: v for k, v in sorted(self.tags.items()) if not is_zero(v)})

    def __add__(self, other):
        o = ExactValue.of(other)
        tags = dict(self.tags)
        for k, v in o.tags.items():
            tags[k] = tags[k] + v if k in tags else v
        return ExactValue(self.rational + o.rational, tags)._clean()

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-ExactValue.of(other))

    def scale(self, c) -> "ExactValue":
        return ExactValue(self.rational * c, {k: v * c for k, v in self.tags.items()})._clean()

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def is_rational(self) -> bool:
        return not self._clean().tags

    def is_zero(self) -> bool:
        return is_zero(self.rational) and self.is_rational()

    def __eq__(self, other):
        o = ExactValue.of(other)
        d = self - o
        return d.is_zero()

    def __hash__(self):
        return hash((str(self),))

    def __complex__(self):
        z = complex(self.rational)
        for k, v in self.tags.items():
            z += complex(v) * _tag_value(k)
        return z

    def __str__(self):
        parts = []
        if not is_zero(self.rational) or not self.tags:
            parts.append(_fmt(self.rational))
        for k, v in sorted(self.tags.items()):
            sym = "γ" if k == "gamma" else k
            c = _fmt(v)
            parts.append(sym if c == "1" else f"-{sym}" if c == "-1" else f"{c}{sym}" if _simple(v) else f"({c}){sym}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"rational": scalar_to_json(self.rational),
                "tags": {k: scalar_to_json(v) for k, v in sorted(self.tags.items())},
                "text": str(self)}


def _simple(v) -> bool:
    return isinstance(v, QI) and v.is_real() or isinstance(v, (int, Fraction))


def _fmt(v) -> str:
    if isinstance(v, QI):
        return str(v)
    if isinstance(v, complex):
        return repr(v.real) if v.imag == 0 else repr(v)
    return str(v)


def _tag_value(tag: str) -> float:
    if tag == "gamma":
        return float(np.euler_gamma)
    if tag.startswith("zeta(") and tag.endswith(")"):
        return float(scipy.special.zeta(int(tag[5:-1])))
    raise ValueError(f"unknown symbolic constant {tag!r}")


def zeta_at(s: int) -> ExactValue:
    """Riemann zeta at an integer ``s != 1``: exact for ``s <= 0``, tagged for ``s >= 2``."""
    if s == 1:
        raise ValueError("zeta has a pole at 1")
    if s == 0:
        return ExactValue(QI(Fraction(-1, 2)))
    if s < 0:
        n = -s
        b = Fraction(str(sympy.bernoulli(n + 1)))
        return ExactValue(QI(-b / (n + 1)))
    return ExactValue(QI(0), {f"zeta({s})": QI(1)})


# ---------------------------------------------------------------------- diagonal
@dataclass
class DiagonalSymbol:
    """Diagonal ``sum c |n|^a sign(n)^b`` for ``n != 0`` plus exact values at listed modes.

    ``terms`` maps ``(a, b)`` to a matrix; ``exceptions`` maps a mode to the full
    diagonal block there (mode 0 is always listed).
    """

    dim: int
    exact: bool
    terms: dict
    exceptions: dict

    def generic(self, n: int) -> np.ndarray:
        if n == 0:
            raise ValueError("the generic formula is not valid at mode 0")
        out = _zeros(self.dim, self.exact)
        for (a, b), c in self.terms.items():
            v = Fraction(abs(n)) ** a * ((-1 if n < 0 else 1) ** b)
            out = out + c * (QI(v) if self.exact else float(v))
        return out

    def value(self, n: int) -> np.ndarray:
        if n in self.exceptions:
            return self.exceptions[n]
        return self.generic(n)

    def is_zero(self) -> bool:
        return all(_mat_zero(c) for c in self.terms.values()) and all(_mat_zero(v) for v in self.exceptions.values())


def _zeros(dim, exact):
    out = np.empty((dim, dim), dtype=object if exact else complex)
    out[...] = QI(0) if exact else 0j
    return out


def _mat_zero(m) -> bool:
    return all(is_zero(x) for x in np.asarray(m).flat)


def _tr(m):
    t = m[0, 0]
    for i in range(1, m.shape[0]):
        t = t + m[i, i]
    return t


def diagonal_symbol(A: BandOperator) -> DiagonalSymbol:
    """Closed form of ``<e_n, A e_n>``."""
    terms: dict = {}
    for (j, q, p), m in A.monomials.items():
        c = m.coeff(0)
        if _mat_zero(c):
            continue
        key = (j - p, (j + q) % 2)
        terms[key] = terms[key] + c if key in terms else c
    terms = {k: v for k, v in terms.items() if not _mat_zero(v)}
    diag = DiagonalSymbol(A.dim, A.exact, terms, {})
    modes = {0} | {r for (r, c) in A.correction if r == c}
    diag.exceptions = {n: A.entry(n, n) for n in sorted(modes)}
    return diag


def _trace_parts(A: BandOperator) -> tuple[ExactValue, object]:
    """Finite part and coefficient of ``1/z`` in ``tr(A Q^{-z})``."""
    d = diagonal_symbol(A)
    zero = QI(0) if A.exact else 0j
    finite = ExactValue(zero)
    pole = zero
    for (a, b), c in d.terms.items():
        if b == 1:
            continue
        tc = _tr(c)
        if a == -1:
            # 2 zeta(1 + 2z) = 1/z + 2 gamma + O(z)
            pole = pole + tc
            finite = finite + ExactValue(zero, {"gamma": tc * 2})
        else:
            finite = finite + zeta_at(-a).scale(tc * 2)
    for n, v in d.exceptions.items():
        if n == 0:
            finite = finite + ExactValue(_tr(v))
        else:
            finite = finite + ExactValue(_tr(v - d.generic(n)))
    return finite, pole


def renorm_trace(A: BandOperator) -> ExactValue:
    """``tr^Delta(A) = lim_{z -> 0} (tr(A Q^{-z}) - res(A) / (2z))``."""
    return _trace_parts(A)[0]


def res_zeta(A: BandOperator):
    """Zeta residue: twice the coefficient of ``1/z`` in ``tr(A Q^{-z})``."""
    return _trace_parts(A)[1] * 2


def plain_trace(A: BandOperator):
    """Ordinary trace of a finitely supported operator."""
    if not A.is_finite():
        raise ClassViolation("plain trace needs a finitely supported operator")
    t = QI(0) if A.exact else 0j
    for (r, c), v in A.correction.items():
        if r == c:
            t = t + _tr(v)
    return t


# ---------------------------------------------------------------------- cocycle and pairing
def _eps_bracket(a: BandOperator) -> BandOperator:
    e = BandOperator.eps(a.dim, a.exact)
    out = op_bracket(e, a)
    if not out.is_finite():
        raise ClassViolation("[eps, a] is not finitely supported for this operator")
    return out


def schwinger_cocycle(a: BandOperator, b: BandOperator):
    """``c_s(a, b) = 1/2 tr(eps [eps, a] [eps, b])`` as an exact finite sum."""
    e = BandOperator.eps(a.dim, a.exact)
    prod = op_mul(e, op_mul(_eps_bracket(a), _eps_bracket(b)))
    half = QI(Fraction(1, 2)) if a.exact else 0.5
    return plain_trace(prod) * half


def pairing_hs_delta(A: BandOperator, B: BandOperator) -> ExactValue:
    """``(A, B)_Delta = tr^Delta(A B^*)``."""
    return renorm_trace(op_mul(A, op_adjoint(B)))


# ---------------------------------------------------------------------- connections
def theta_connection(w: BandOperator, a: BandOperator, b: BandOperator) -> BandOperator:
    """``Theta^w_a b = b [a, w]``."""
    return op_mul(b, op_bracket(a, w))


def theta_pseudo_hermitian(w: BandOperator, a: BandOperator, b: BandOperator) -> BandOperator:
    """``theta^w_a b = b [a - a^*, w]``."""
    return op_mul(b, op_bracket(a - op_adjoint(a), w))


def theta_s(s: BandOperator, a: BandOperator, b: BandOperator, side: str = "left",
            skew: bool = True) -> BandOperator:
    """Smoothing connections built from a finite operator ``s``.

    With ``k = s a s^*`` (``skew=False``) or ``k = s (a - a^*) s^*`` (``skew=True``):
    ``side="left"`` gives ``k b``, ``"right"`` gives ``b k`` and ``"bracket"`` gives ``[k, b]``.
    """
    if not s.is_finite():
        raise ClassViolation("theta_s needs a finitely supported s")
    x = a - op_adjoint(a) if skew else a
    k = op_mul(op_mul(s, x), op_adjoint(s))
    if side == "left":
        return op_mul(k, b)
    if side == "right":
        return op_mul(b, k)
    if side == "bracket":
        return op_bracket(k, b)
    raise ValueError(f"unknown side {side!r}")


def curvature_theta(w: BandOperator, a: BandOperator, b: BandOperator, c: BandOperator) -> BandOperator:
    """``Omega(a, b) c = Theta_a Theta_b c - Theta_b Theta_a c - Theta_{[a,b]} c``.

    With ``Theta_a c = c [a, w]`` this is ``c[b,w][a,w] - c[a,w][b,w] - c[[a,b],w]``.
    """
    ta = op_bracket(a, w)
    tb = op_bracket(b, w)
    tab = op_bracket(op_bracket(a, b), w)
    return op_mul(op_mul(c, tb), ta) - op_mul(op_mul(c, ta), tb) - op_mul(c, tab)


def hermitian_defect(w, a: BandOperator, b: BandOperator, c: BandOperator,
                     connection: Callable | None = None) -> ExactValue:
    """``(theta_a b, c)_Delta + (b, theta_a c)_Delta``.

    ``connection(a, b)`` defaults to ``theta^w_a b``; pass e.g.
    ``lambda a, b: theta_s(s, a, b, "left")`` for the smoothing families.
    """
    conn = connection if connection is not None else (lambda x, y: theta_pseudo_hermitian(w, x, y))
    return pairing_hs_delta(conn(a, b), c) + pairing_hs_delta(b, conn(a, c))


def odd_traciality_check(A: BandOperator, B: BandOperator) -> ExactValue:
    """``tr^Delta [A, B]`` for two differential-type operators, or a finite one against any."""
    if not ((A.is_differential() and B.is_differential()) or A.is_finite() or B.is_finite()):
        raise ClassViolation("odd traciality is checked on differential-type pairs or finite-rank commutators")
    return renorm_trace(op_bracket(A, B))
