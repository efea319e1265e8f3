"""Concrete operators on the Fourier modes ``e_n = e^{inx}`` of the circle.

A :class:`BandOperator` is a finite sum of normal-ordered monomials
``m(x) D^j eps^q W^p`` plus a finitely supported matrix correction.  On modes,

* ``D e_n = n e_n`` (so ``d/dx = iD``),
* ``eps e_n = sign(n) e_n`` with ``sign(0) = +1``,
* ``W e_n = |n|^{-1} e_n`` for ``n != 0`` and ``W e_0 = e_0``,
* ``m`` acts by multiplication, ``m e_n = sum_k m_k e_{n+k}``.

Canonical monomials have ``j == 0`` or ``p == 0``; the mode-0 discrepancy of
rewriting ``D^j W^p`` is moved into the correction.  Products are reordered
with the Leibniz rule for ``D`` and the finite commutator ``[eps, m]``.  A
``W``-bearing factor may only be followed by constant multiplications, and a
product of two ``W``-bearing factors is rejected: both would need expansions
that are not finite in this class.
"""

from __future__ import annotations

import ast
import math
import re
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from .fourier import FourierPoly, _matrix
from .scalar import QI, as_scalar, is_zero, scalar_from_json, scalar_to_json
from .symbol import FormalSymbol

__all__ = [
    "ClassViolation",
    "BandOperator",
    "op_build",
    "op_mul",
    "op_add",
    "op_bracket",
    "op_adjoint",
    "analytic_symbol",
]


class ClassViolation(ValueError):
    """Raised when a product or adjoint leaves the closed operator class."""


Key = tuple  # (j, q, p)


def _sign(n: int) -> int:
    return 1 if n >= 0 else -1


def _canonical(j: int, q: int, p: int) -> Key:
    """Canonical exponents of ``D^j eps^q W^p`` away from mode 0."""
    q %= 2
    if j > 0 and p > 0:
        if j >= p:
            return (j - p, (q + p) % 2, 0)
        return (0, (j + q) % 2, p - j)
    return (j, q, p)


def _phi(key: Key, n: int, exact: bool):
    """Diagonal value ``n^j sign(n)^q w(n)^p`` of a (possibly non-canonical) monomial."""
    j, q, p = key
    if n == 0:
        v = 1 if j == 0 else 0
        return QI(v) if exact else complex(v)
    v = Fraction(n) ** j * (_sign(n) ** q) / Fraction(abs(n)) ** p
    return QI(v) if exact else complex(float(v))


class BandOperator:
    """``sum m_{jqp}(x) D^j eps^q W^p + C`` with ``C`` finitely supported.

    Parameters
    ----------
    monomials : mapping
        ``(j, q, p)`` to :class:`FourierPoly`.  Keys are canonicalized on entry.
    correction : mapping
        ``(row, col)`` mode pair to a ``dim x dim`` matrix.
    """

    __slots__ = ("dim", "exact", "_mono", "_corr")

    def __init__(self, monomials: Mapping | None = None, correction: Mapping | None = None,
                 dim: int = 1, exact: bool = True):
        self.dim = int(dim)
        self.exact = bool(exact)
        self._mono: dict[Key, FourierPoly] = {}
        self._corr: dict[tuple[int, int], np.ndarray] = {}
        for key, m in (monomials or {}).items():
            self._add_mono(tuple(int(x) for x in key), self._fp(m))
        for (r, c), v in (correction or {}).items():
            self._add_corr(int(r), int(c), _matrix(v, self.dim, self.exact))

    # ------------------------------------------------------------------ construction helpers
    def _fp(self, m) -> FourierPoly:
        if isinstance(m, FourierPoly):
            if m.dim != self.dim:
                raise ValueError(f"dimension mismatch: {m.dim} vs {self.dim}")
            if m.exact != self.exact:
                if self.exact:
                    raise TypeError("float coefficient in an exact operator")
                return m.to_float()
            return m
        return FourierPoly.constant(m, self.dim, self.exact)

    def _zero_mat(self):
        z = QI(0) if self.exact else 0j
        out = np.empty((self.dim, self.dim), dtype=object if self.exact else complex)
        out[...] = z
        return out

    def _add_corr(self, r: int, c: int, v: np.ndarray):
        cur = self._corr.get((r, c))
        new = v if cur is None else cur + v
        if all(is_zero(x) for x in new.flat) if self.exact else not np.any(np.abs(new) > 0):
            self._corr.pop((r, c), None)
        else:
            self._corr[(r, c)] = new

    def _add_mono(self, key: Key, m: FourierPoly):
        if m.is_zero():
            return
        if key[0] < 0 or key[2] < 0:
            raise ValueError(f"negative exponent in monomial {key}")
        ck = _canonical(*key)
        if ck != key:
            # mode-0 discrepancy between the original and canonical forms
            delta = _phi(key, 0, self.exact) - _phi(ck, 0, self.exact)
            if not is_zero(delta):
                for k, mk in m.coeffs.items():
                    self._add_corr(k, 0, mk * delta)
        cur = self._mono.get(ck)
        new = m if cur is None else cur + m
        if new.is_zero():
            self._mono.pop(ck, None)
        else:
            self._mono[ck] = new

    @classmethod
    def identity(cls, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls({(0, 0, 0): FourierPoly.identity(dim, exact)}, dim=dim, exact=exact)

    @classmethod
    def zero(cls, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls(dim=dim, exact=exact)

    @classmethod
    def mult(cls, m: FourierPoly) -> "BandOperator":
        return cls({(0, 0, 0): m}, dim=m.dim, exact=m.exact)

    @classmethod
    def monomial(cls, m: FourierPoly, j: int = 0, q: int = 0, p: int = 0) -> "BandOperator":
        return cls({(j, q, p): m}, dim=m.dim, exact=m.exact)

    @classmethod
    def D(cls, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls({(1, 0, 0): FourierPoly.identity(dim, exact)}, dim=dim, exact=exact)

    @classmethod
    def eps(cls, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls({(0, 1, 0): FourierPoly.identity(dim, exact)}, dim=dim, exact=exact)

    @classmethod
    def W(cls, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls({(0, 0, 1): FourierPoly.identity(dim, exact)}, dim=dim, exact=exact)

    @classmethod
    def vector_field(cls, u: FourierPoly) -> "BandOperator":
        """``u d/dx = i u D``."""
        i = QI(0, 1) if u.exact else 1j
        return cls({(1, 0, 0): u.scale(i)}, dim=u.dim, exact=u.exact)

    @classmethod
    def finite(cls, entries: Mapping, dim: int = 1, exact: bool = True) -> "BandOperator":
        return cls(correction=entries, dim=dim, exact=exact)

    # ------------------------------------------------------------------ inspection
    @property
    def monomials(self) -> dict[Key, FourierPoly]:
        return dict(self._mono)

    @property
    def correction(self) -> dict[tuple[int, int], np.ndarray]:
        return dict(self._corr)

    def is_finite(self) -> bool:
        """Only a finitely supported part remains."""
        return not self._mono

    def is_zero(self) -> bool:
        return not self._mono and not self._corr

    def has_W(self) -> bool:
        return any(k[2] > 0 for k in self._mono)

    def is_differential(self) -> bool:
        return not self._corr and all(q == 0 and p == 0 for (_, q, p) in self._mono)

    def is_multiplication(self) -> bool:
        return not self._corr and all(k == (0, 0, 0) for k in self._mono)

    def entry(self, r: int, c: int) -> np.ndarray:
        """Matrix element ``<e_r, A e_c>`` as a ``dim x dim`` block."""
        out = self._zero_mat()
        for key, m in self._mono.items():
            mk = m.coeff(r - c)
            phi = _phi(key, c, self.exact)
            if not is_zero(phi):
                out = out + mk * phi
        v = self._corr.get((r, c))
        return out if v is None else out + v

    def apply(self, vec: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
        """Apply to a finitely supported vector ``{mode: dim-vector}``."""
        out: dict[int, np.ndarray] = {}

        def add(n, v):
            out[n] = v if n not in out else out[n] + v

        for c, x in vec.items():
            x = np.asarray(x, dtype=object if self.exact else complex)
            for key, m in self._mono.items():
                phi = _phi(key, c, self.exact)
                if is_zero(phi):
                    continue
                for k, mk in m.coeffs.items():
                    add(c + k, mk.dot(x) * phi)
            for (r, cc), v in self._corr.items():
                if cc == c:
                    add(r, v.dot(x))
        return out

    def __eq__(self, other):
        if not isinstance(other, BandOperator):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("BandOperator is not hashable")

    def __repr__(self):
        return f"BandOperator(monomials={sorted(self._mono)}, correction_support={sorted(self._corr)})"

    # ------------------------------------------------------------------ arithmetic
    def __add__(self, other):
        return op_add(self, _as_op(other, self))

    def __radd__(self, other):
        return op_add(_as_op(other, self), self)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return op_add(self, _as_op(other, self).scale(-1))

    def __rsub__(self, other):
        return op_add(_as_op(other, self), self.scale(-1))

    def __mul__(self, other):
        if isinstance(other, BandOperator):
            return op_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other):
        return op_mul(self, other)

    def scale(self, c) -> "BandOperator":
        c = as_scalar(c, self.exact)
        out = BandOperator(dim=self.dim, exact=self.exact)
        if is_zero(c):
            return out
        out._mono = {k: m.scale(c) for k, m in self._mono.items()}
        out._corr = {k: v * c for k, v in self._corr.items()}
        return out

    def adjoint(self) -> "BandOperator":
        return op_adjoint(self)

    def to_float(self) -> "BandOperator":
        if not self.exact:
            return self
        out = BandOperator(dim=self.dim, exact=False)
        out._mono = {k: m.to_float() for k, m in self._mono.items()}
        out._corr = {k: np.array([[complex(x) for x in row] for row in v], dtype=complex)
                     for k, v in self._corr.items()}
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "monomials": [{"j": j, "q": q, "p": p, "m": m.to_json()} for (j, q, p), m in sorted(self._mono.items())],
            "correction": [{"row": r, "col": c, "value": [[scalar_to_json(x) for x in row] for row in v]}
                           for (r, c), v in sorted(self._corr.items())],
        }

    @classmethod
    def from_json(cls, obj: dict, exact: bool = True) -> "BandOperator":
        dim = int(obj.get("dim", 1))
        mono = {(e["j"], e["q"], e["p"]): FourierPoly.from_json(e["m"], exact) for e in obj.get("monomials", [])}
        corr = {(e["row"], e["col"]): [[scalar_from_json(x, exact) for x in row] for row in e["value"]]
                for e in obj.get("correction", [])}
        return cls(mono, corr, dim=dim, exact=exact)


def _as_op(x, like: BandOperator) -> BandOperator:
    if isinstance(x, BandOperator):
        return x
    return BandOperator.identity(like.dim, like.exact).scale(x)


def _check(A: BandOperator, B: BandOperator):
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if A.exact != B.exact:
        return A.to_float(), B.to_float()
    return A, B


def op_add(A: BandOperator, B: BandOperator) -> BandOperator:
    A, B = _check(A, B)
    out = BandOperator(dim=A.dim, exact=A.exact)
    out._mono = dict(A._mono)
    out._corr = dict(A._corr)
    for k, m in B._mono.items():
        out._add_mono(k, m)
    for (r, c), v in B._corr.items():
        out._add_corr(r, c, v)
    return out


def _eps_commutator(m: FourierPoly) -> dict[tuple[int, int], np.ndarray]:
    """Finite matrix of ``[eps, m]``: entry ``(n+k, n)`` is ``(sign(n+k) - sign(n)) m_k``."""
    out = {}
    for k, mk in m.coeffs.items():
        if k == 0:
            continue
        # sign(n+k) != sign(n) exactly for n in [-k, -1] (k > 0) or [0, -k-1] (k < 0)
        rng = range(-k, 0) if k > 0 else range(0, -k)
        for n in rng:
            d = _sign(n + k) - _sign(n)
            out[(n + k, n)] = mk * d
    return out


def _D_of(m: FourierPoly, s: int) -> FourierPoly:
    """Function ``D^s m`` (coefficients ``k^s m_k``), i.e. ``(-i d/dx)^s m``."""
    if s == 0:
        return m
    return FourierPoly({k: v * (k ** s) for k, v in m.coeffs.items()}, dim=m.dim, exact=m.exact)


def _mono_times_corr(key, m, corr, exact, dim) -> dict:
    """``(m Phi) C`` entrywise."""
    out = {}
    mc = m.coeffs
    for (s, c), v in corr.items():
        phi = _phi(key, s, exact)
        if is_zero(phi):
            continue
        for k, mk in mc.items():
            r = s + k
            val = mk.dot(v) * phi
            out[(r, c)] = val if (r, c) not in out else out[(r, c)] + val
    return out


def _corr_times_mono(corr, key, m, exact, dim) -> dict:
    """``C (m Phi)`` entrywise."""
    out = {}
    mc = m.coeffs
    for (r, s), v in corr.items():
        for k, mk in mc.items():
            c = s - k
            phi = _phi(key, c, exact)
            if is_zero(phi):
                continue
            val = v.dot(mk) * phi
            out[(r, c)] = val if (r, c) not in out else out[(r, c)] + val
    return out


def _corr_times_corr(C1, C2) -> dict:
    by_row: dict[int, list] = {}
    for (s, c), v in C2.items():
        by_row.setdefault(s, []).append((c, v))
    out = {}
    for (r, s), u in C1.items():
        for c, v in by_row.get(s, ()):
            val = u.dot(v)
            out[(r, c)] = val if (r, c) not in out else out[(r, c)] + val
    return out


def op_mul(A: BandOperator, B: BandOperator) -> BandOperator:
    """Exact normal-ordered product ``A o B``.

    Raises
    ------
    ClassViolation
        When a ``W``-bearing monomial of ``A`` meets a non-constant
        multiplication of ``B``, or when two ``W``-bearing monomials meet.
    """
    A, B = _check(A, B)
    exact, dim = A.exact, A.dim
    out = BandOperator(dim=dim, exact=exact)
    for k1, m1 in A._mono.items():
        j1, q1, p1 = k1
        for k2, m2 in B._mono.items():
            j2, q2, p2 = k2
            if p1 > 0 and p2 > 0:
                raise ClassViolation("product of two W-bearing factors is outside the supported class")
            if m2.is_constant():
                c = m1.mul(m2)
                out._add_mono((j1 + j2, q1 + q2, p1 + p2), c)
                continue
            if p1 > 0:
                raise ClassViolation("a W-bearing factor followed by a non-constant multiplication "
                                     "is outside the supported class")
            # D^j1 eps^q1 m2 = D^j1 (m2 eps^q1 + q1 [eps, m2])
            for r in range(j1 + 1):
                c = m1.mul(_D_of(m2, j1 - r)).scale(math.comb(j1, r))
                out._add_mono((r + j2, q1 + q2, p2), c)
            if q1:
                C = _eps_commutator(m2)
                # left factor m1 D^j1, right factor the B monomial
                C = _mono_times_corr((j1, 0, 0), m1, C, exact, dim)
                C = _corr_times_mono(C, k2, FourierPoly.identity(dim, exact), exact, dim)
                for (r, c), v in C.items():
                    out._add_corr(r, c, v)
        if B._corr:
            for (r, c), v in _mono_times_corr(k1, m1, B._corr, exact, dim).items():
                out._add_corr(r, c, v)
    if A._corr:
        for k2, m2 in B._mono.items():
            for (r, c), v in _corr_times_mono(A._corr, k2, m2, exact, dim).items():
                out._add_corr(r, c, v)
        for (r, c), v in _corr_times_corr(A._corr, B._corr).items():
            out._add_corr(r, c, v)
    return out


def op_bracket(A: BandOperator, B: BandOperator) -> BandOperator:
    return op_mul(A, B) - op_mul(B, A)


def op_adjoint(A: BandOperator) -> BandOperator:
    """Hilbert adjoint: ``(m Phi)^* = Phi m^*`` reordered; corrections conjugate-transposed.

    Raises
    ------
    ClassViolation
        For a ``W``-bearing monomial with non-constant coefficient, whose
        adjoint ``W m^*`` cannot be normal-ordered.
    """
    exact, dim = A.exact, A.dim
    out = BandOperator(dim=dim, exact=exact)
    for (j, q, p), m in A._mono.items():
        phi = BandOperator({(j, q, p): FourierPoly.identity(dim, exact)}, dim=dim, exact=exact)
        out = out + op_mul(phi, BandOperator.mult(m.adjoint()))
    for (r, c), v in A._corr.items():
        vt = v.T.copy()
        if exact:
            vt = np.vectorize(lambda x: x.conjugate(), otypes=[object])(vt)
        else:
            vt = vt.conj()
        out._add_corr(c, r, vt)
    return out


def analytic_symbol(A: BandOperator) -> FormalSymbol:
    """Two-component symbol of the monomial part with ``D <-> xi``.

    ``m D^j eps^q W^p`` has grade ``j - p`` with plus component ``m`` and minus
    component ``(-1)^(j+q) m``.  Corrections are smoothing and drop out.  This
    is the dictionary used to compare zeta residues with symbol residues; it
    fixes ``D`` (not ``d/dx``) as the grade-1 generator.
    """
    g: dict[int, list] = {}
    for (j, q, p), m in A.monomials.items():
        sgn = -1 if (j + q) % 2 else 1
        n = j - p
        cur = g.get(n)
        pm = (m, m.scale(sgn))
        g[n] = pm if cur is None else (cur[0] + pm[0], cur[1] + pm[1])
    return FormalSymbol({n: tuple(v) for n, v in g.items()}, dim=A.dim, exact=A.exact)


# ---------------------------------------------------------------------- expression language
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:/\d+)?)|(?P<m>m\{)|(?P<name>dx|eps|D|W|i)"
                    r"|(?P<op>[-+*/^()]))")


def _parse_value(v, exact: bool):
    """Coefficient of one frequency: scalar, ``[re, im]``, or a square matrix of those."""
    def scal(x):
        if isinstance(x, (list, tuple)):
            return scalar_from_json(list(x), exact)
        if isinstance(x, float) and exact:
            return QI(Fraction(str(x)))
        return as_scalar(Fraction(x) if isinstance(x, str) else x, exact)

    def is_num(x):
        return isinstance(x, (int, float, str))

    if is_num(v):
        return 1, scal(v)
    if isinstance(v, (list, tuple)):
        if len(v) == 2 and all(is_num(x) for x in v):
            return 1, scal(v)
        rows = list(v)
        # a single row of two numbers is the 1x1 matrix [[re, im]]
        if len(rows) == 1 and isinstance(rows[0], (list, tuple)) and len(rows[0]) == 2 \
                and all(is_num(x) for x in rows[0]):
            return 1, [[scal(rows[0])]]
        d = len(rows)
        if any(not isinstance(r, (list, tuple)) or len(r) != d for r in rows):
            raise ValueError(f"coefficient {v!r} is not a square matrix")
        return d, [[scal(x) for x in r] for r in rows]
    raise ValueError(f"unsupported coefficient {v!r}")


def _scan(expr: str) -> Iterator[tuple[str, str]]:
    pos = 0
    n = len(expr)
    while pos < n:
        if expr[pos:].strip() == "":
            return
        mt = _TOKEN.match(expr, pos)
        if not mt:
            raise ValueError(f"unexpected character at column {pos + 1}: {expr[pos:pos + 10]!r}")
        kind = mt.lastgroup
        if kind == "m":
            depth, j = 1, mt.end()
            while j < n and depth:
                depth += {"{": 1, "}": -1}.get(expr[j], 0)
                j += 1
            if depth:
                raise ValueError(f"unbalanced braces starting at column {mt.start() + 1}")
            yield "m", expr[mt.end() - 1:j]
            pos = j
        else:
            yield kind, mt.group(kind)
            pos = mt.end()


class _Parser:
    def __init__(self, expr: str, dim: int | None, exact: bool):
        self.exact = exact
        toks = list(_scan(expr))
        self.fps = {}
        dims = set()
        for i, (k, v) in enumerate(toks):
            if k == "m":
                raw = ast.literal_eval(v)
                if not isinstance(raw, dict):
                    raise ValueError(f"m{{...}} must be a mapping frequency -> coefficient, got {v!r}")
                parsed = {int(f): _parse_value(c, exact) for f, c in raw.items()}
                ds = {d for d, _ in parsed.values()}
                dims |= ds
                self.fps[i] = parsed
        if dim is None:
            if len(dims) > 1:
                raise ValueError(f"inconsistent coefficient sizes {sorted(dims)}")
            dim = dims.pop() if dims else 1
        elif dims - {dim, 1}:
            raise ValueError(f"coefficient sizes {sorted(dims)} do not match dim {dim}")
        self.dim = dim
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, want=None):
        tok = self.peek()
        if tok[0] is None or (want is not None and tok[1] != want):
            raise ValueError(f"expected {want or 'a term'} at token {self.i + 1}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> BandOperator:
        out = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.i + 1}: {self.toks[self.i][1]!r}")
        return out

    def expr(self):
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self):
        out = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            t = self.unary()
            if op == "*":
                out = op_mul(out, t)
            else:
                c = _scalar_of(t)
                if c is None or is_zero(c):
                    raise ValueError("division is only by nonzero scalars")
                out = out.scale((QI(1) / c) if self.exact else 1 / c)
        return out

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return self.unary().scale(-1)
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            k, v = self.take()
            if k != "num" or not v.isdigit():
                raise ValueError(f"exponent must be a nonnegative integer, got {v!r}")
            out = BandOperator.identity(self.dim, self.exact)
            for _ in range(int(v)):
                out = op_mul(out, base)
            return out
        return base

    def atom(self):
        idx = self.i
        k, v = self.take()
        d, ex = self.dim, self.exact
        one = FourierPoly.identity(d, ex)
        if k == "num":
            val = Fraction(v) if ex else float(Fraction(v))
            return BandOperator.identity(d, ex).scale(val)
        if k == "name":
            if v == "i":
                return BandOperator.identity(d, ex).scale(QI(0, 1) if ex else 1j)
            if v == "D":
                return BandOperator.D(d, ex)
            if v == "dx":
                return BandOperator.vector_field(one)
            if v == "eps":
                return BandOperator.eps(d, ex)
            if v == "W":
                return BandOperator.W(d, ex)
        if k == "m":
            coeffs = {f: c for f, (_, c) in self.fps[idx].items()}
            return BandOperator.mult(FourierPoly(coeffs, dim=d, exact=ex))
        if v == "(":
            out = self.expr()
            self.take(")")
            return out
        raise ValueError(f"unexpected token {v!r}")


def _scalar_of(A: BandOperator):
    if A._corr or set(A._mono) - {(0, 0, 0)}:
        return None
    m = A._mono.get((0, 0, 0))
    if m is None:
        return QI(0) if A.exact else 0j
    if not m.is_constant():
        return None
    c = m.mean()
    s = c[0, 0]
    for i in range(A.dim):
        for j in range(A.dim):
            if (i == j and c[i, j] != s) or (i != j and not is_zero(c[i, j])):
                return None
    return s


def op_build(expr: str, dim: int | None = None, exact: bool = True) -> BandOperator:
    """Parse an operator expression.

    Tokens: numbers (``3``, ``1/2``, ``0.25``), ``i``, ``D``, ``dx`` (= ``iD``),
    ``eps``, ``W``, multiplications ``m{freq: coeff, ...}``, ``+ - * / ^`` and
    parentheses.  A coefficient is a scalar, an ``[re, im]`` pair, or a square
    matrix of those; ``[[re, im]]`` is read as a 1x1 matrix.

    Examples
    --------
    >>> A = op_build("m{1: 1} * D^2 * eps")
    """
    return _Parser(expr, dim, exact).parse()
