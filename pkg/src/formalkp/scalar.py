"""Exact Gaussian-rational scalars and helpers shared by the exact and float modes."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from flint import fmpq

__all__ = ["QI", "to_fmpq", "as_exact", "as_scalar", "scalar_to_json", "scalar_from_json", "is_zero"]


def to_fmpq(x) -> fmpq:
    """Convert an int, Fraction, fmpq or ``"p/q"`` string to :class:`flint.fmpq`."""
    if isinstance(x, fmpq):
        return x
    if isinstance(x, bool):
        return fmpq(int(x))
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, Rational):
        return fmpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        f = Fraction(x.strip())
        return fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def _frac(q: fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class QI:
    """Gaussian rational ``re + i*im`` with exact arithmetic.

    Interoperates with ``int``, ``Fraction`` and ``fmpq``; mixing with a Python
    ``complex`` degrades to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            self.re, self.im = re.re, re.im + to_fmpq(im)
            return
        self.re = to_fmpq(re)
        self.im = to_fmpq(im)

    # construction helpers
    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            raise TypeError("float complex value in exact mode")
        if isinstance(x, float):
            raise TypeError("float value in exact mode")
        return cls(x)

    @property
    def real(self) -> Fraction:
        return _frac(self.re)

    @property
    def imag(self) -> Fraction:
        return _frac(self.im)

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def abs2(self) -> fmpq:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.q == 1

    def __complex__(self) -> complex:
        return complex(float(_frac(self.re)), float(_frac(self.im)))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # arithmetic
    def _other(self, o):
        if isinstance(o, QI):
            return o
        if isinstance(o, (int, Fraction, fmpq)):
            return QI(o)
        return None

    def __add__(self, o):
        q = self._other(o)
        if q is None:
            return complex(self) + o if isinstance(o, (float, complex)) else NotImplemented
        return QI(self.re + q.re, self.im + q.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, o):
        q = self._other(o)
        if q is None:
            return complex(self) - o if isinstance(o, (float, complex)) else NotImplemented
        return QI(self.re - q.re, self.im - q.im)

    def __rsub__(self, o):
        q = self._other(o)
        if q is None:
            return o - complex(self) if isinstance(o, (float, complex)) else NotImplemented
        return QI(q.re - self.re, q.im - self.im)

    def __mul__(self, o):
        q = self._other(o)
        if q is None:
            return complex(self) * o if isinstance(o, (float, complex)) else NotImplemented
        if q.im == 0:
            return QI(self.re * q.re, self.im * q.re)
        return QI(self.re * q.re - self.im * q.im, self.re * q.im + self.im * q.re)

    __rmul__ = __mul__

    def inverse(self) -> "QI":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("QI division by zero")
        return QI(self.re / n, -self.im / n)

    def __truediv__(self, o):
        q = self._other(o)
        if q is None:
            return complex(self) / o if isinstance(o, (float, complex)) else NotImplemented
        return self * q.inverse()

    def __rtruediv__(self, o):
        q = self._other(o)
        if q is None:
            return o / complex(self) if isinstance(o, (float, complex)) else NotImplemented
        return q * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("QI powers must be integers")
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QI(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, QI):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction, fmpq)):
            return self.im == 0 and self.re == to_fmpq(o)
        if isinstance(o, (float, complex)):
            return complex(self) == o
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(_frac(self.re))
        return hash((_frac(self.re), _frac(self.im)))

    def __repr__(self):
        if self.im == 0:
            return f"QI({self.re})"
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(_frac(self.im))}*i"


I = QI(0, 1)


def as_exact(x) -> QI:
    return QI.coerce(x)


def as_scalar(x, exact: bool):
    """Coerce ``x`` to the scalar type of the given mode."""
    if exact:
        return QI.coerce(x)
    return complex(x)


def is_zero(x) -> bool:
    if isinstance(x, QI):
        return x.is_zero()
    return x == 0


def scalar_to_json(x):
    """``[re, im]`` with exact rationals rendered as ``"p/q"`` strings."""
    if isinstance(x, QI):
        return [str(_frac(x.re)), str(_frac(x.im))]
    z = complex(x)
    return [z.real, z.imag]


def scalar_from_json(v, exact: bool):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"scalar must be [re, im], got {v!r}")
        re, im = v
    else:
        re, im = v, 0
    if exact:
        if isinstance(re, float) or isinstance(im, float):
            raise ValueError("float literal in exact mode")
        return QI(re, im)
    return complex(float(Fraction(re) if isinstance(re, str) else re),
                   float(Fraction(im) if isinstance(im, str) else im))
