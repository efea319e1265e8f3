"""Two-component graded formal symbols on the circle.

A :class:`FormalSymbol` is a finite window of a classical formal symbol

    sigma(x, xi) = sum_j plus_j(x) xi^(beta + j)      for xi > 0,
                   sum_j minus_j(x) |xi|^(beta + j)   for xi < 0,

with matrix-valued trigonometric coefficients.  Composition uses the formal
Leibniz law with the real derivation ``d/dx`` (no factors of ``i``), applied
separately on each half line.  Grades below ``depth`` are unknown; ``depth=None``
marks a complete symbol whose missing grades are genuinely zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from .fourier import FourierPoly
from .scalar import QI, as_scalar, scalar_from_json, scalar_to_json

__all__ = [
    "FormalSymbol",
    "Residues",
    "sym_compose",
    "sym_bracket",
    "sym_bracket_eps",
    "split_pm",
    "split_ds",
    "parity_class",
    "phi_map",
    "residues",
    "pairing_res",
    "j1_apply",
    "sym_neumann_inverse",
    "psido",
    "pushforward_product",
]

SIGNS = (1, -1)


def _floor_real(beta, exact: bool) -> int:
    if exact:
        return math.floor(beta.real)
    r = beta.real
    k = round(r)
    if abs(r - k) < 1e-12:
        return int(k)
    return math.floor(r)


def _is_zero_scalar(x) -> bool:
    if isinstance(x, QI):
        return x.is_zero()
    return x == 0


def _ff(k, a: int, exact: bool):
    """Falling factorial k(k-1)...(k-a+1) for scalar ``k``."""
    out = QI(1) if exact else 1 + 0j
    for i in range(a):
        out = out * (k - i)
    return out


def _combine_depth(a, b):
    """Larger of two depths, where None means minus infinity."""
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class FormalSymbol:
    """Finite window of a two-component classical formal symbol.

    Parameters
    ----------
    grades : mapping
        Relative grade ``j`` to a ``(plus, minus)`` pair.  Entries may be
        :class:`FourierPoly` or scalars (read as constant multiples of the identity).
    dim : int
        Matrix size of the coefficients.
    offset : scalar
        Complex grade offset ``beta``.  It is normalized so that
        ``0 <= Re(beta) < 1``, moving the integer part into the grades.
    depth : int or None
        Lowest retained relative grade.  ``None`` means the symbol is complete
        (all grades not listed are exactly zero).
    exact : bool
        Arithmetic mode of the coefficients.
    """

    __slots__ = ("dim", "exact", "offset", "depth", "_grades")

    def __init__(self, grades: Mapping | None = None, dim: int = 1, offset=0, depth: int | None = None,
                 exact: bool = True):
        self.dim = int(dim)
        self.exact = bool(exact)
        beta = as_scalar(offset, self.exact)
        shift = _floor_real(beta, self.exact)
        if not self.exact and abs(beta - round(beta.real)) < 1e-12:
            beta = complex(round(beta.real), 0)
        self.offset = beta - shift
        if not self.exact and abs(self.offset) < 1e-12:
            self.offset = 0j
        self.depth = None if depth is None else int(depth) + shift
        g = {}
        for j, pair in (grades or {}).items():
            j = int(j) + shift
            if self.depth is not None and j < self.depth:
                continue
            p, m = (self._fp(v) for v in pair)
            if p.is_zero() and m.is_zero():
                continue
            g[j] = (p, m)
        self._grades = g

    def _fp(self, v) -> FourierPoly:
        if isinstance(v, FourierPoly):
            if v.dim != self.dim:
                raise ValueError(f"dimension mismatch: {v.dim} vs {self.dim}")
            if v.exact and not self.exact:
                return v.to_float()
            if not v.exact and self.exact:
                raise TypeError("float coefficient in an exact symbol")
            return v
        return FourierPoly.constant(v, self.dim, self.exact)

    @classmethod
    def _raw(cls, dim, exact, offset, depth, grades) -> "FormalSymbol":
        obj = cls.__new__(cls)
        obj.dim, obj.exact, obj.offset, obj.depth = dim, exact, offset, depth
        obj._grades = {j: pm for j, pm in grades.items()
                       if not (pm[0].is_zero() and pm[1].is_zero()) and (depth is None or j >= depth)}
        return obj

    # ------------------------------------------------------------------ named symbols
    @classmethod
    def identity(cls, dim: int = 1, exact: bool = True) -> "FormalSymbol":
        return cls({0: (1, 1)}, dim=dim, exact=exact)

    @classmethod
    def zero(cls, dim: int = 1, exact: bool = True, depth: int | None = None, offset=0) -> "FormalSymbol":
        return cls({}, dim=dim, exact=exact, depth=depth, offset=offset)

    @classmethod
    def d(cls, dim: int = 1, exact: bool = True) -> "FormalSymbol":
        """The derivation ``d/dx``: grade 1, plus = 1, minus = -1."""
        return cls({1: (1, -1)}, dim=dim, exact=exact)

    @classmethod
    def eps(cls, dim: int = 1, exact: bool = True) -> "FormalSymbol":
        """Sign of the frequency ``xi/|xi|``: grade 0, plus = 1, minus = -1."""
        return cls({0: (1, -1)}, dim=dim, exact=exact)

    @classmethod
    def abs_d_inv(cls, dim: int = 1, exact: bool = True) -> "FormalSymbol":
        """``|xi|^{-1}``: grade -1, plus = minus = 1."""
        return cls({-1: (1, 1)}, dim=dim, exact=exact)

    @classmethod
    def mult(cls, u: FourierPoly) -> "FormalSymbol":
        """Multiplication by ``u`` (grade 0 in both components)."""
        return cls({0: (u, u)}, dim=u.dim, exact=u.exact)

    # ------------------------------------------------------------------ inspection
    @property
    def grades(self) -> dict[int, tuple[FourierPoly, FourierPoly]]:
        return dict(self._grades)

    def grade(self, j: int) -> tuple[FourierPoly, FourierPoly]:
        z = FourierPoly.zero(self.dim, self.exact)
        return self._grades.get(j, (z, z))

    @property
    def top(self) -> int | None:
        return max(self._grades) if self._grades else None

    @property
    def bottom(self) -> int | None:
        return min(self._grades) if self._grades else None

    def is_zero(self) -> bool:
        return not self._grades

    def has_integer_offset(self) -> bool:
        return _is_zero_scalar(self.offset) if self.exact else abs(self.offset) < 1e-12

    def _require_integer_offset(self, what: str):
        if not self.has_integer_offset():
            raise ValueError(f"{what} requires an integer grade offset, got {self.offset}")

    def __repr__(self):
        parts = []
        for j in sorted(self._grades, reverse=True):
            p, m = self._grades[j]
            parts.append(f"{j}: ({p!r}, {m!r})")
        return (f"FormalSymbol({{{', '.join(parts)}}}, dim={self.dim}, offset={self.offset}, "
                f"depth={self.depth})")

    def to_float(self) -> "FormalSymbol":
        if not self.exact:
            return self
        return FormalSymbol._raw(self.dim, False, complex(self.offset), self.depth,
                                 {j: (p.to_float(), m.to_float()) for j, (p, m) in self._grades.items()})

    def map_coeffs(self, fn: Callable[[FourierPoly], FourierPoly], depth=..., which: str = "both") -> "FormalSymbol":
        g = {}
        for j, (p, m) in self._grades.items():
            g[j] = (fn(p) if which in ("both", "plus") else p, fn(m) if which in ("both", "minus") else m)
        return FormalSymbol._raw(self.dim, self.exact, self.offset, self.depth if depth is ... else depth, g)

    def derive_x(self, order: int = 1) -> "FormalSymbol":
        """Coefficient-wise ``d/dx`` (equals ``[d/dx, A]``)."""
        return self.map_coeffs(lambda f: f.derive(order))

    def truncate(self, depth: int | None) -> "FormalSymbol":
        """Restrict to relative grades ``>= depth``; the result's depth is the coarser of the two."""
        new = _combine_depth(self.depth, depth)
        return FormalSymbol._raw(self.dim, self.exact, self.offset, new,
                                 {j: pm for j, pm in self._grades.items() if new is None or j >= new})

    def with_depth(self, depth: int | None) -> "FormalSymbol":
        """Same grades, declared window ``depth`` (drops grades below it)."""
        return FormalSymbol._raw(self.dim, self.exact, self.offset, depth,
                                 {j: pm for j, pm in self._grades.items() if depth is None or j >= depth})

    def max_abs(self) -> float:
        return max((max(p.max_abs(), m.max_abs()) for p, m in self._grades.values()), default=0.0)

    # ------------------------------------------------------------------ linear structure
    def _align(self, other: "FormalSymbol"):
        if not isinstance(other, FormalSymbol):
            raise TypeError(f"expected FormalSymbol, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        a, b = self, other
        if a.exact != b.exact:
            a, b = a.to_float(), b.to_float()
        if a.exact:
            same = a.offset == b.offset
        else:
            same = abs(a.offset - b.offset) < 1e-12
        if not same:
            if a.is_zero() and a.depth is None:
                a = FormalSymbol.zero(a.dim, a.exact, offset=b.offset)
            elif b.is_zero() and b.depth is None:
                b = FormalSymbol.zero(b.dim, b.exact, offset=a.offset)
            else:
                raise ValueError(f"grade offsets {a.offset} and {b.offset} differ by a non-integer")
        return a, b

    def __add__(self, other):
        if not isinstance(other, FormalSymbol):
            if _is_zero_scalar(other):
                return self
            other = FormalSymbol({0: (other, other)}, dim=self.dim, exact=self.exact)
        a, b = self._align(other)
        depth = _combine_depth(a.depth, b.depth)
        g = dict(a._grades)
        for j, (p, m) in b._grades.items():
            if j in g:
                g[j] = (g[j][0] + p, g[j][1] + m)
            else:
                g[j] = (p, m)
        return FormalSymbol._raw(a.dim, a.exact, a.offset, depth, g)

    __radd__ = __add__

    def __neg__(self):
        return self.map_coeffs(lambda f: -f)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FormalSymbol":
        out = self.map_coeffs(lambda f: f.scale(c))
        if self.exact and isinstance(c, (float, complex)):
            return FormalSymbol._raw(self.dim, False, complex(self.offset), self.depth, out._grades)
        return out

    def left_mult(self, u: FourierPoly) -> "FormalSymbol":
        """Coefficient-wise ``u * a_j`` (composition with a grade-0 multiplication on the left)."""
        return self.map_coeffs(lambda f: u * f)

    def __mul__(self, other):
        if isinstance(other, FormalSymbol):
            return sym_compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other):
        return sym_compose(self, other)

    def __eq__(self, other):
        """Equality on the common window: grades at or above both depths."""
        if not isinstance(other, FormalSymbol):
            return NotImplemented
        try:
            a, b = self._align(other)
        except ValueError:
            return False
        cut = _combine_depth(a.depth, b.depth)
        keys = {j for j in a._grades.keys() | b._grades.keys() if cut is None or j >= cut}
        for j in keys:
            pa, ma = a.grade(j)
            pb, mb = b.grade(j)
            if pa != pb or ma != mb:
                return False
        return True

    __hash__ = None

    def agrees(self, other: "FormalSymbol", depth: int | None = None, tol: float = 0.0) -> bool:
        """Equality on grades ``>= depth`` (and the common window), optionally within ``tol``."""
        diff = (self - other).truncate(depth)
        if tol == 0.0:
            return diff.is_zero()
        return diff.max_abs() <= tol

    # ------------------------------------------------------------------ projections
    def plus_part(self) -> "FormalSymbol":
        z = FourierPoly.zero(self.dim, self.exact)
        return FormalSymbol._raw(self.dim, self.exact, self.offset, self.depth,
                                 {j: (p, z) for j, (p, m) in self._grades.items()})

    def minus_part(self) -> "FormalSymbol":
        z = FourierPoly.zero(self.dim, self.exact)
        return FormalSymbol._raw(self.dim, self.exact, self.offset, self.depth,
                                 {j: (z, m) for j, (p, m) in self._grades.items()})

    def d_part(self) -> "FormalSymbol":
        """Grades ``>= 0`` (differential part), a complete symbol."""
        self._require_integer_offset("D/S split")
        if self.depth is not None and self.depth > 0:
            raise ValueError(f"window depth {self.depth} does not reach grade 0")
        return FormalSymbol._raw(self.dim, self.exact, self.offset, None,
                                 {j: pm for j, pm in self._grades.items() if j >= 0})

    def s_part(self) -> "FormalSymbol":
        """Grades ``<= -1`` (integral part)."""
        self._require_integer_offset("D/S split")
        return FormalSymbol._raw(self.dim, self.exact, self.offset, self.depth,
                                 {j: pm for j, pm in self._grades.items() if j <= -1})

    # ------------------------------------------------------------------ JSON
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "offset": scalar_to_json(self.offset),
            "depth": self.depth,
            "grades": {str(j): {"plus": p.to_json(), "minus": m.to_json()}
                       for j, (p, m) in sorted(self._grades.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, exact: bool = True) -> "FormalSymbol":
        if "odd" in obj:
            dim = int(obj.get("dim", 1))
            coeffs = {int(k): FourierPoly.from_json(v, exact) for k, v in obj["odd"].items()}
            return psido(coeffs, dim=dim, exact=exact, depth=obj.get("depth"))
        dim = int(obj.get("dim", 1))
        offset = scalar_from_json(obj.get("offset", ["0", "0"]), exact)
        g = {int(j): (FourierPoly.from_json(v["plus"], exact), FourierPoly.from_json(v["minus"], exact))
             for j, v in obj.get("grades", {}).items()}
        return cls(g, dim=dim, offset=offset, depth=obj.get("depth"), exact=exact)


# ---------------------------------------------------------------------- composition
def _natural_depth(A: FormalSymbol, B: FormalSymbol):
    cands = []
    if A.depth is not None and B.top is not None:
        cands.append(A.depth + B.top)
    if B.depth is not None and A.top is not None:
        cands.append(B.depth + A.top)
    if (A.is_zero() and A.depth is None) or (B.is_zero() and B.depth is None):
        return None
    return max(cands) if cands else None


def sym_compose(A: FormalSymbol, B: FormalSymbol, depth: int | None = None) -> FormalSymbol:
    """Composition ``A o B`` on each half line.

    Component ``s`` (``+1`` for xi > 0, ``-1`` for xi < 0) receives

        c_n = sum (1/alpha!) s^alpha ff(beta_A + k, alpha) a_k d^alpha b_l,  k + l - alpha = n.

    The result is exact on relative grades ``>= depth``; the returned depth is
    raised to the largest grade that the inputs' windows determine.
    """
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if A.exact != B.exact:
        A, B = A.to_float(), B.to_float()
    exact = A.exact
    offset_sum = A.offset + B.offset
    # grades below are counted from offset_sum; normalizing adds `shift`
    shift = _floor_real(offset_sum, exact)
    nat = _natural_depth(A, B)
    cut = _combine_depth(depth, None if nat is None else nat + shift)
    if A.is_zero() or B.is_zero():
        return FormalSymbol(dim=A.dim, offset=offset_sum, depth=None if cut is None else cut - shift,
                            exact=exact)
    int_a = A.has_integer_offset()
    if cut is None and not (int_a and A.bottom >= 0):
        raise ValueError("composition produces an infinite series; pass an explicit depth")
    # unnormalized result grades are k + l - alpha relative to offset_sum
    b_top = B.top
    acc: dict[int, list] = {}
    dcache: dict[tuple[int, int, int], FourierPoly] = {}

    def dB(l, a, s):
        key = (l, a, s)
        f = dcache.get(key)
        if f is None:
            base = B._grades[l][0 if s == 1 else 1]
            f = base if a == 0 else dB(l, a - 1, s).derive(1)
            dcache[key] = f
        return f

    lowest = None if cut is None else cut - shift  # lower bound on the unnormalized n
    b_items = sorted(B._grades.items(), reverse=True)
    for k, (ak_p, ak_m) in A._grades.items():
        kk = (k if exact else complex(k)) if int_a else A.offset + k
        amax = None if lowest is None else k + b_top - lowest
        if int_a and k >= 0:
            amax = k if amax is None else min(amax, k)
        if amax is None or amax < 0:
            if amax is None:
                raise ValueError("composition produces an infinite series; pass an explicit depth")
            continue
        for alpha in range(amax + 1):
            ffac = _ff(kk, alpha, exact)
            if _is_zero_scalar(ffac):
                break
            base_c = ffac / math.factorial(alpha) if alpha > 1 else ffac
            for sidx, s in enumerate(SIGNS):
                ak = ak_p if s == 1 else ak_m
                if ak.is_zero():
                    continue
                c = base_c if (s == 1 or alpha % 2 == 0) else -base_c
                ca = ak if (c == 1) else ak.scale(c)
                for l, pm in b_items:
                    n = k + l - alpha
                    if lowest is not None and n < lowest:
                        break
                    if pm[sidx].is_zero():
                        continue
                    term = ca * dB(l, alpha, s)
                    slot = acc.setdefault(n, [None, None])
                    slot[sidx] = term if slot[sidx] is None else slot[sidx] + term
    z = FourierPoly.zero(A.dim, exact)
    grades = {n + shift: (p if p is not None else z, m if m is not None else z) for n, (p, m) in acc.items()}
    return FormalSymbol._raw(A.dim, exact, offset_sum - shift, cut, grades)


def sym_bracket(A: FormalSymbol, B: FormalSymbol, depth: int | None = None) -> FormalSymbol:
    """Commutator ``AB - BA``."""
    return sym_compose(A, B, depth) - sym_compose(B, A, depth)


def sym_bracket_eps(A: FormalSymbol, B: FormalSymbol, depth: int | None = None) -> FormalSymbol:
    """``(1/2)([eps A, B] + [A, eps B])``."""
    e = FormalSymbol.eps(A.dim, A.exact)
    half = QI(1, 0) / 2 if A.exact else 0.5
    s = sym_bracket(sym_compose(e, A), B, depth) + sym_bracket(A, sym_compose(e, B), depth)
    return s.scale(half)


def split_pm(A: FormalSymbol) -> tuple[FormalSymbol, FormalSymbol]:
    return A.plus_part(), A.minus_part()


def split_ds(A: FormalSymbol) -> tuple[FormalSymbol, FormalSymbol]:
    return A.d_part(), A.s_part()


def parity_class(A: FormalSymbol) -> str:
    """``"odd"``, ``"even"`` or ``"neither"``.

    Odd means ``minus_k = (-1)^k plus_k`` at every grade, even means
    ``minus_k = (-1)^(k+1) plus_k``.  The zero symbol is reported as odd.
    """
    A._require_integer_offset("parity classification")
    odd = even = True
    for k, (p, m) in A._grades.items():
        if odd and m != (p if k % 2 == 0 else -p):
            odd = False
        if even and m != (-p if k % 2 == 0 else p):
            even = False
        if not (odd or even):
            return "neither"
    return "odd" if odd else "even"


def psido(coeffs: Mapping[int, FourierPoly], dim: int | None = None, exact: bool | None = None,
          depth: int | None = None) -> FormalSymbol:
    """Odd-class symbol of the operator ``sum_k a_k d^k``."""
    return phi_map(1, 1, coeffs, dim=dim, exact=exact, depth=depth)


def _power(c, k: int, exact: bool):
    if _is_zero_scalar(c):
        return QI(0) if exact else 0j
    return c ** k


def phi_map(lam, mu, P, dim: int | None = None, exact: bool | None = None, depth: int | None = None) -> FormalSymbol:
    """Injection ``sum a_k d^k -> plus_k = lam^k a_k, minus_k = (-mu)^k a_k`` with ``0^k = 0``.

    ``P`` is either a mapping ``k -> a_k`` or an odd-class symbol, whose plus
    components are read as the ``a_k``.
    """
    if isinstance(P, FormalSymbol):
        P._require_integer_offset("phi_map")
        if parity_class(P) != "odd":
            raise ValueError("phi_map expects an odd-class operator")
        coeffs = {k: p for k, (p, m) in P.grades.items()}
        dim, exact = P.dim, P.exact
        depth = P.depth if depth is None else depth
    else:
        coeffs = dict(P)
        first = next(iter(coeffs.values()), None)
        if dim is None:
            dim = first.dim if first is not None else 1
        if exact is None:
            exact = first.exact if first is not None else True
    lam, mu = as_scalar(lam, exact), as_scalar(mu, exact)
    if _is_zero_scalar(lam) and _is_zero_scalar(mu):
        raise ValueError("phi_map requires (lambda, mu) != (0, 0)")
    g = {}
    for k, a in coeffs.items():
        if not isinstance(a, FourierPoly):
            a = FourierPoly.constant(a, dim, exact)
        g[k] = (a.scale(_power(lam, k, exact)), a.scale(_power(-mu, k, exact)))
    return FormalSymbol(g, dim=dim, exact=exact, depth=depth)


def pushforward_product(A: FormalSymbol, B: FormalSymbol, lam, depth: int | None = None) -> FormalSymbol:
    """Composition carried to plus-only symbols by ``phi_map(lam, 0, .)``.

    ``A *_lam B = Phi(Phi^{-1}(A) o Phi^{-1}(B))``.  Expanded, the order-``a``
    Leibniz term is scaled by ``lam^{-a}``; for ``lam = 1`` this is the plain
    product restricted to the plus component.
    """
    for X in (A, B):
        X._require_integer_offset("pushforward product")
        if not X.minus_part().is_zero():
            raise ValueError("pushforward product acts on plus-only symbols")
    exact = A.exact
    lam = as_scalar(lam, exact)
    if _is_zero_scalar(lam):
        raise ValueError("lambda must be nonzero")
    inv = (QI(1) / lam) if exact else 1 / lam

    def pull(X):
        return psido({k: p.scale(inv ** k) for k, (p, m) in X.grades.items()}, dim=X.dim, exact=exact,
                     depth=X.depth)

    C = sym_compose(pull(A), pull(B), depth)
    return phi_map(lam, 0, C)


# ---------------------------------------------------------------------- residues and pairings
@dataclass(frozen=True)
class Residues:
    """Grade -1 functionals: Adler trace (odd class only), half-residues and their sum."""

    adler: object
    res_plus: object
    res_minus: object
    res: object


def _tr_mean(f: FourierPoly):
    m = f.mean()
    t = m[0, 0]
    for i in range(1, f.dim):
        t = t + m[i, i]
    return t


def residues(A: FormalSymbol) -> Residues:
    A._require_integer_offset("residues")
    if A.depth is not None and A.depth > -1:
        raise ValueError(f"grade -1 lies below the window (depth {A.depth})")
    p, m = A.grade(-1)
    rp, rm = _tr_mean(p), _tr_mean(m)
    adler = rp if parity_class(A) == "odd" else None
    return Residues(adler=adler, res_plus=rp, res_minus=rm, res=rp + rm)


def pairing_res(A: FormalSymbol, B: FormalSymbol, depth: int = -1) -> object:
    """Invariant pairing ``res(A o B)``."""
    return residues(sym_compose(A, B, depth)).res


def j1_apply(A: FormalSymbol) -> FormalSymbol:
    """``J1(A) = i eps o A``: plus -> i plus, minus -> -i minus."""
    i = QI(0, 1) if A.exact else 1j
    g = {j: (p.scale(i), m.scale(-i)) for j, (p, m) in A.grades.items()}
    return FormalSymbol._raw(A.dim, A.exact, A.offset, A.depth, g)


def sym_neumann_inverse(A: FormalSymbol, depth: int) -> FormalSymbol:
    """Inverse of ``A = 1 + W`` with ``W`` of negative order, by ``sum_n (-W)^n``."""
    A._require_integer_offset("Neumann inverse")
    one = FormalSymbol.identity(A.dim, A.exact)
    W = A - one
    if not W.is_zero() and W.top >= 0:
        raise ValueError(f"1 - A has a grade {W.top} >= 0 component; the Neumann series does not terminate")
    out = one
    term = one
    negW = -W
    n = 0
    while True:
        term = sym_compose(term, negW, depth)
        n += 1
        if term.is_zero():
            break
        out = out + term
    return out.truncate(_combine_depth(depth, A.depth))
