"""Matrix-valued trigonometric polynomials on the circle.

A :class:`FourierPoly` stores ``f(x) = sum_n c_n e^{inx}`` with ``c_n`` a
``dim x dim`` matrix.  Two backends share one interface:

* exact mode keeps every matrix entry as a Laurent polynomial in ``z = e^{ix}``
  with Gaussian-rational coefficients, split into real and imaginary
  ``flint.fmpq_poly`` parts, so products are exact polynomial products;
* float mode keeps a dense ``complex128`` array of shape ``(N, dim, dim)``.

Values are immutable.  Integrals are normalized means, so ``mean(f) = c_0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np
from flint import fmpq, fmpq_poly

from .scalar import QI, as_scalar, scalar_from_json, scalar_to_json, to_fmpq

__all__ = [
    "FourierPoly",
    "fp_linear_combine",
    "fp_mul",
    "fp_derive",
    "fp_mean",
    "fp_invert_approx",
]

_ZERO = fmpq_poly([])


def _poly_is_zero(p: fmpq_poly) -> bool:
    return p.is_zero()


def _shift(p: fmpq_poly, k: int) -> fmpq_poly:
    return p.left_shift(k) if k else p


def _cmul(a, b, c, d):
    """(a + ib)(c + id) on fmpq_poly parts, skipping structural zeros."""
    bz, dz = b.is_zero(), d.is_zero()
    if bz and dz:
        return a * c, _ZERO
    if bz:
        return a * c, a * d
    if dz:
        return a * c, b * c
    if a.is_zero() and c.is_zero():
        return -(b * d), _ZERO
    k1 = c * (a + b)
    k2 = a * (d - c)
    k3 = b * (c + d)
    return k1 - k3, k1 + k2


def _matrix(values, dim: int, exact: bool) -> np.ndarray:
    """Coerce a scalar, nested list or array to a ``dim x dim`` matrix of the mode's scalars."""
    if isinstance(values, np.ndarray) and values.ndim == 2:
        rows = values.tolist()
    elif isinstance(values, (list, tuple)):
        rows = values
    else:
        c = as_scalar(values, exact)
        out = np.empty((dim, dim), dtype=object if exact else complex)
        zero = QI(0) if exact else 0j
        for i in range(dim):
            for j in range(dim):
                out[i, j] = c if i == j else zero
        return out
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError(f"expected a {dim}x{dim} matrix, got {values!r}")
    out = np.empty((dim, dim), dtype=object if exact else complex)
    for i in range(dim):
        for j in range(dim):
            out[i, j] = as_scalar(rows[i][j], exact)
    return out


class FourierPoly:
    """Matrix-valued trigonometric polynomial ``sum_n c_n e^{inx}``.

    Parameters
    ----------
    coeffs : mapping
        Frequency ``n`` to a ``dim x dim`` matrix (nested lists, numpy array) or a
        scalar, which is read as a multiple of the identity.
    dim : int, optional
        Matrix size; inferred from the first matrix when omitted.
    exact : bool
        Exact Gaussian-rational arithmetic (default) or complex doubles.
    """

    __slots__ = ("dim", "exact", "_lo", "_data")

    def __init__(self, coeffs: Mapping | None = None, dim: int | None = None, exact: bool = True):
        coeffs = dict(coeffs or {})
        if dim is None:
            dim = 1
            for v in coeffs.values():
                if isinstance(v, (list, tuple, np.ndarray)):
                    dim = len(v)
                    break
        self.dim = int(dim)
        self.exact = bool(exact)
        mats = {int(n): _matrix(v, self.dim, self.exact) for n, v in coeffs.items()}
        if not mats:
            self._set_zero()
            return
        lo, hi = min(mats), max(mats)
        d = self.dim
        if self.exact:
            data = []
            for i in range(d):
                for j in range(d):
                    re = [fmpq(0)] * (hi - lo + 1)
                    im = [fmpq(0)] * (hi - lo + 1)
                    for n, m in mats.items():
                        re[n - lo] = m[i, j].re
                        im[n - lo] = m[i, j].im
                    data.append((fmpq_poly(re), fmpq_poly(im)))
            self._lo, self._data = lo, tuple(data)
        else:
            arr = np.zeros((hi - lo + 1, d, d), dtype=complex)
            for n, m in mats.items():
                arr[n - lo] = m
            self._lo, self._data = lo, arr
            self._trim_float()

    # ------------------------------------------------------------------ internals
    def _set_zero(self):
        self._lo = 0
        if self.exact:
            self._data = tuple((_ZERO, _ZERO) for _ in range(self.dim * self.dim))
        else:
            self._data = np.zeros((0, self.dim, self.dim), dtype=complex)

    @classmethod
    def _raw(cls, dim: int, exact: bool, lo: int, data) -> "FourierPoly":
        obj = cls.__new__(cls)
        obj.dim, obj.exact, obj._lo, obj._data = dim, exact, lo, data
        if not exact:
            obj._trim_float()
        return obj

    def _trim_float(self):
        arr = self._data
        nz = np.flatnonzero(np.any(arr != 0, axis=(1, 2))) if arr.size else np.array([], dtype=int)
        if nz.size == 0:
            self._lo, self._data = 0, np.zeros((0, self.dim, self.dim), dtype=complex)
            return
        a, b = int(nz[0]), int(nz[-1])
        self._lo += a
        self._data = arr[a:b + 1]

    def _check(self, other: "FourierPoly"):
        if not isinstance(other, FourierPoly):
            raise TypeError(f"expected FourierPoly, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerced(self, other: "FourierPoly"):
        """Return (self, other) brought to a common mode (float wins)."""
        self._check(other)
        if self.exact == other.exact:
            return self, other
        return self.to_float(), other.to_float()

    # ------------------------------------------------------------------ constructors
    @classmethod
    def zero(cls, dim: int = 1, exact: bool = True) -> "FourierPoly":
        return cls({}, dim=dim, exact=exact)

    @classmethod
    def constant(cls, c, dim: int = 1, exact: bool = True) -> "FourierPoly":
        return cls({0: c}, dim=dim, exact=exact)

    @classmethod
    def identity(cls, dim: int = 1, exact: bool = True) -> "FourierPoly":
        return cls({0: 1}, dim=dim, exact=exact)

    @classmethod
    def monomial(cls, n: int, c=1, dim: int = 1, exact: bool = True) -> "FourierPoly":
        """``c e^{inx}``."""
        return cls({n: c}, dim=dim, exact=exact)

    # ------------------------------------------------------------------ inspection
    @property
    def coeffs(self) -> dict[int, np.ndarray]:
        """Canonical map frequency -> matrix, zero matrices omitted."""
        d = self.dim
        out: dict[int, np.ndarray] = {}
        if self.exact:
            length = max((max(re.length(), im.length()) for re, im in self._data), default=0)
            for k in range(length):
                m = np.empty((d, d), dtype=object)
                nonzero = False
                for idx, (re, im) in enumerate(self._data):
                    v = QI(re[k], im[k])
                    nonzero = nonzero or not v.is_zero()
                    m[idx // d, idx % d] = v
                if nonzero:
                    out[self._lo + k] = m
        else:
            for k in range(self._data.shape[0]):
                if np.any(self._data[k] != 0):
                    out[self._lo + k] = self._data[k].copy()
        return out

    def coeff(self, n: int) -> np.ndarray:
        d = self.dim
        k = n - self._lo
        if self.exact:
            m = np.empty((d, d), dtype=object)
            for idx, (re, im) in enumerate(self._data):
                m[idx // d, idx % d] = QI(re[k], im[k]) if k >= 0 else QI(0)
            return m
        if 0 <= k < self._data.shape[0]:
            return self._data[k].copy()
        return np.zeros((d, d), dtype=complex)

    def is_zero(self) -> bool:
        if self.exact:
            return all(re.is_zero() and im.is_zero() for re, im in self._data)
        return self._data.shape[0] == 0

    def __bool__(self):
        return not self.is_zero()

    def support(self) -> tuple[int, int] | None:
        c = self.coeffs
        if not c:
            return None
        return min(c), max(c)

    @property
    def band(self) -> int:
        """Largest ``|n|`` with a nonzero coefficient (0 for the zero polynomial)."""
        s = self.support()
        return 0 if s is None else max(abs(s[0]), abs(s[1]))

    def is_constant(self) -> bool:
        s = self.support()
        return s is None or s == (0, 0)

    def is_real(self) -> bool:
        """True when ``c_{-n} = conj(c_n)`` entrywise, i.e. the function is real-valued."""
        return self == self.conj()

    def __eq__(self, other):
        if not isinstance(other, FourierPoly):
            return NotImplemented
        if other.dim != self.dim:
            return False
        if self.exact and other.exact:
            lo = min(self._lo, other._lo)
            for (a, b), (c, d) in zip(self._data, other._data):
                if _shift(a, self._lo - lo) != _shift(c, other._lo - lo):
                    return False
                if _shift(b, self._lo - lo) != _shift(d, other._lo - lo):
                    return False
            return True
        a, b = self.coeffs, other.coeffs
        if a.keys() != b.keys():
            return False
        return all(np.all(a[n] == b[n]) for n in a)

    __hash__ = None

    def max_abs(self) -> float:
        """Largest coefficient modulus (float), used for tolerance reports."""
        c = self.coeffs
        if not c:
            return 0.0
        return max(abs(complex(v)) for m in c.values() for v in m.ravel())

    def __repr__(self):
        parts = []
        for n, m in sorted(self.coeffs.items()):
            val = m[0, 0] if self.dim == 1 else m.tolist()
            parts.append(f"{n}: {val}")
        mode = "" if self.exact else ", float"
        return f"FourierPoly({{{', '.join(parts)}}}, dim={self.dim}{mode})"

    # ------------------------------------------------------------------ conversions
    def to_float(self) -> "FourierPoly":
        if not self.exact:
            return self
        return FourierPoly({n: m.astype(complex) for n, m in self.coeffs.items()},
                           dim=self.dim, exact=False)

    def evaluate(self, x) -> np.ndarray:
        """Pointwise values at the points ``x``; shape ``(len(x), dim, dim)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((x.size, self.dim, self.dim), dtype=complex)
        for n, m in self.coeffs.items():
            out += np.exp(1j * n * x)[:, None, None] * m.astype(complex)[None]
        return out

    def entry(self, i: int, j: int) -> "FourierPoly":
        return FourierPoly({n: m[i, j] for n, m in self.coeffs.items()}, dim=1, exact=self.exact)

    def trace(self) -> "FourierPoly":
        """Pointwise matrix trace as a dim-1 polynomial."""
        out = {}
        for n, m in self.coeffs.items():
            t = m[0, 0]
            for i in range(1, self.dim):
                t = t + m[i, i]
            out[n] = t
        return FourierPoly(out, dim=1, exact=self.exact)

    # ------------------------------------------------------------------ arithmetic
    def __add__(self, other):
        if not isinstance(other, FourierPoly):
            if other == 0:
                return self
            return self + FourierPoly.constant(other, self.dim, self.exact)
        a, b = self._coerced(other)
        if a.exact:
            if a.is_zero():
                return b
            if b.is_zero():
                return a
            lo = min(a._lo, b._lo)
            sa, sb = a._lo - lo, b._lo - lo
            data = tuple((_shift(p, sa) + _shift(r, sb), _shift(q, sa) + _shift(s, sb))
                         for (p, q), (r, s) in zip(a._data, b._data))
            return FourierPoly._raw(a.dim, True, lo, data)
        if a._data.shape[0] == 0:
            return b
        if b._data.shape[0] == 0:
            return a
        lo = min(a._lo, b._lo)
        hi = max(a._lo + a._data.shape[0], b._lo + b._data.shape[0])
        arr = np.zeros((hi - lo, a.dim, a.dim), dtype=complex)
        arr[a._lo - lo:a._lo - lo + a._data.shape[0]] += a._data
        arr[b._lo - lo:b._lo - lo + b._data.shape[0]] += b._data
        return FourierPoly._raw(a.dim, False, lo, arr)

    __radd__ = __add__

    def __neg__(self):
        if self.exact:
            return FourierPoly._raw(self.dim, True, self._lo, tuple((-p, -q) for p, q in self._data))
        return FourierPoly._raw(self.dim, False, self._lo, -self._data)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FourierPoly":
        """Multiply by a scalar ``c``."""
        if self.exact:
            if isinstance(c, (float, complex)):
                return self.to_float().scale(c)
            c = QI.coerce(c)
            if c.is_zero():
                return FourierPoly.zero(self.dim, True)
            x, y = c.re, c.im
            if y == 0:
                data = tuple((p * x, q * x) for p, q in self._data)
            elif x == 0:
                data = tuple((-(q * y), p * y) for p, q in self._data)
            else:
                data = tuple((p * x - q * y, q * x + p * y) for p, q in self._data)
            return FourierPoly._raw(self.dim, True, self._lo, data)
        return FourierPoly._raw(self.dim, False, self._lo, self._data * complex(c))

    def __mul__(self, other):
        if isinstance(other, FourierPoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def mul(self, other: "FourierPoly") -> "FourierPoly":
        """Pointwise matrix product (full convolution of coefficients, no band cut)."""
        a, b = self._coerced(other)
        d = a.dim
        if a.exact:
            if d == 1:
                (p, q), = a._data
                (r, s), = b._data
                return FourierPoly._raw(1, True, a._lo + b._lo, (_cmul(p, q, r, s),))
            data = []
            for i in range(d):
                for j in range(d):
                    re, im = _ZERO, _ZERO
                    for l in range(d):
                        p, q = a._data[i * d + l]
                        r, s = b._data[l * d + j]
                        if (p.is_zero() and q.is_zero()) or (r.is_zero() and s.is_zero()):
                            continue
                        x, y = _cmul(p, q, r, s)
                        re, im = re + x, im + y
                    data.append((re, im))
            return FourierPoly._raw(d, True, a._lo + b._lo, tuple(data))
        na, nb = a._data.shape[0], b._data.shape[0]
        if na == 0 or nb == 0:
            return FourierPoly.zero(d, False)
        if d == 1:
            arr = np.convolve(a._data[:, 0, 0], b._data[:, 0, 0])[:, None, None]
        else:
            arr = np.zeros((na + nb - 1, d, d), dtype=complex)
            for k in range(na):
                arr[k:k + nb] += np.matmul(a._data[k][None], b._data)
        return FourierPoly._raw(d, False, a._lo + b._lo, arr)

    def derive(self, order: int = 1) -> "FourierPoly":
        """``d^order/dx^order``: ``c_n -> (in)^order c_n``."""
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order == 0 or self.is_zero():
            return self
        if self.exact:
            lo = self._lo
            data = list(self._data)
            for _ in range(order):
                # z d/dz on z^lo P(z) gives z^lo (lo P + z P')
                data = [(p * lo + p.derivative().left_shift(1), q * lo + q.derivative().left_shift(1))
                        for p, q in data]
            r = order % 4
            if r == 1:
                data = [(-q, p) for p, q in data]
            elif r == 2:
                data = [(-p, -q) for p, q in data]
            elif r == 3:
                data = [(q, -p) for p, q in data]
            return FourierPoly._raw(self.dim, True, lo, tuple(data))
        n = np.arange(self._lo, self._lo + self._data.shape[0])
        fac = (1j * n) ** order
        return FourierPoly._raw(self.dim, False, self._lo, self._data * fac[:, None, None])

    def mean(self) -> np.ndarray:
        """Normalized integral ``(1/2pi) \\oint f`` = the frequency-0 matrix."""
        return self.coeff(0)

    def shift(self, k: int) -> "FourierPoly":
        """Multiply by ``e^{ikx}``."""
        if self.exact:
            return FourierPoly._raw(self.dim, True, self._lo + k, self._data)
        return FourierPoly._raw(self.dim, False, self._lo + k, self._data.copy())

    def conj(self) -> "FourierPoly":
        """Entrywise complex conjugate of the function (no transpose)."""
        return FourierPoly({-n: np.vectorize(lambda v: v.conjugate(), otypes=[object if self.exact else complex])(m)
                            for n, m in self.coeffs.items()}, dim=self.dim, exact=self.exact)

    def adjoint(self) -> "FourierPoly":
        """Pointwise conjugate transpose ``f(x)^H``."""
        c = self.conj()
        return FourierPoly({n: m.T for n, m in c.coeffs.items()}, dim=self.dim, exact=self.exact)

    def truncate(self, band: int) -> "FourierPoly":
        """Keep only frequencies ``|n| <= band``."""
        return FourierPoly({n: m for n, m in self.coeffs.items() if abs(n) <= band},
                           dim=self.dim, exact=self.exact)

    def invert_approx(self, band: int, tol: float = 1e-12, max_iter: int = 60) -> "FourierPoly":
        """Band-limited inverse by Newton iteration ``x <- x(2 - f x)`` from ``c_0^{-1}``.

        Raises
        ------
        ZeroDivisionError
            If ``c_0`` is singular.
        RuntimeError
            If the truncated residual does not fall below ``tol`` within ``max_iter`` steps.
        """
        c0 = self.coeff(0)
        inv0 = _matrix_inverse(c0, self.exact)
        x = FourierPoly({0: inv0}, dim=self.dim, exact=self.exact)
        one = FourierPoly.identity(self.dim, self.exact)
        res = float("inf")
        for _ in range(max_iter):
            r = (self * x - one).truncate(band)
            res = r.max_abs()
            if res <= tol:
                return x
            x = (x * (one + one - self * x)).truncate(band)
        raise RuntimeError(f"Newton inverse did not converge: residual {res:.3e} after {max_iter} steps")

    # ------------------------------------------------------------------ JSON
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "coeffs": {str(n): [[scalar_to_json(v) for v in row] for row in m.tolist()]
                       for n, m in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, exact: bool = True) -> "FourierPoly":
        dim = int(obj.get("dim", 1))
        coeffs = {}
        for n, rows in obj.get("coeffs", {}).items():
            if isinstance(rows, list) and rows and isinstance(rows[0], list):
                coeffs[int(n)] = [[scalar_from_json(v, exact) for v in row] for row in rows]
            else:
                # scalar shorthand: a number, "p/q" string or [re, im] pair
                coeffs[int(n)] = scalar_from_json(rows, exact)
        return cls(coeffs, dim=dim, exact=exact)


def _matrix_inverse(m: np.ndarray, exact: bool) -> np.ndarray:
    d = m.shape[0]
    if not exact:
        if abs(np.linalg.det(m)) < 1e-300:
            raise ZeroDivisionError("singular frequency-0 coefficient")
        return np.linalg.inv(m.astype(complex))
    # Gauss-Jordan over QI
    a = [[m[i, j] for j in range(d)] + [QI(1 if i == j else 0) for j in range(d)] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular frequency-0 coefficient")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [v * inv for v in a[col]]
        for r in range(d):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = a[i][d + j]
    return out


# ---------------------------------------------------------------------- functional API
def fp_linear_combine(terms: Iterable[tuple[object, FourierPoly]]) -> FourierPoly:
    """``sum_i c_i f_i`` in canonical form."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty linear combination")
    out = None
    for c, f in terms:
        t = f.scale(c)
        out = t if out is None else out + t
    return out


def fp_mul(f: FourierPoly, g: FourierPoly) -> FourierPoly:
    return f.mul(g)


def fp_derive(f: FourierPoly, order: int = 1) -> FourierPoly:
    return f.derive(order)


def fp_mean(f: FourierPoly) -> np.ndarray:
    return f.mean()


def fp_invert_approx(f: FourierPoly, band: int, tol: float = 1e-12) -> FourierPoly:
    return f.invert_approx(band, tol)
