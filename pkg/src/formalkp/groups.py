"""Coefficient groups for pairwise comparison matrices."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np
import scipy.linalg

__all__ = ["Group", "PosReal", "GL", "Affine", "SO2", "group_from_tag"]


class Group(ABC):
    """Interface: identity, product, inverse, tolerant equality and an optional metric."""

    tag: str = ""
    exact: bool = False
    tol: float = 1e-10

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def mul(self, a, b): ...

    @abstractmethod
    def inv(self, a): ...

    @abstractmethod
    def eq(self, a, b, tol: float | None = None) -> bool: ...

    def dist(self, a, b) -> float:
        """Left-invariant distance ``d(a, b) = d(1, a^{-1} b)``."""
        raise NotImplementedError(f"group {self.tag} has no metric")

    def has_metric(self) -> bool:
        try:
            self.dist(self.identity(), self.identity())
        except NotImplementedError:
            return False
        return True

    def prod(self, *xs):
        out = self.identity()
        for x in xs:
            out = self.mul(out, x)
        return out

    def is_identity(self, a, tol: float | None = None) -> bool:
        return self.eq(a, self.identity(), tol)

    @abstractmethod
    def random(self, rng: np.random.Generator): ...

    @abstractmethod
    def to_json(self, a): ...

    @abstractmethod
    def from_json(self, v): ...

    def describe(self) -> dict:
        return {"group": self.tag}


class PosReal(Group):
    """Multiplicative positive reals; exact ``Fraction`` elements by default."""

    tag = "pos_real"

    def __init__(self, exact: bool = True, tol: float = 1e-10):
        self.exact = exact
        self.tol = tol

    def _c(self, a):
        if self.exact:
            a = Fraction(a)
        else:
            a = float(a)
        if a <= 0:
            raise ValueError(f"{a} is not a positive real")
        return a

    def identity(self):
        return Fraction(1) if self.exact else 1.0

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def eq(self, a, b, tol=None):
        if self.exact and isinstance(a, Fraction) and isinstance(b, Fraction):
            return a == b
        t = self.tol if tol is None else tol
        return abs(math.log(a / b)) <= t

    def dist(self, a, b) -> float:
        return abs(math.log(b / a))

    def random(self, rng):
        if self.exact:
            return Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
        return float(np.exp(rng.normal()))

    def to_json(self, a):
        return str(a) if self.exact else float(a)

    def from_json(self, v):
        return self._c(Fraction(v) if isinstance(v, str) else v)


class GL(Group):
    """Invertible ``n x n`` real or complex matrices in floating point."""

    tag = "gl"

    def __init__(self, n: int = 2, tol: float = 1e-10, cond_max: float = 1e12):
        self.n = n
        self.tol = tol
        self.cond_max = cond_max

    def identity(self):
        return np.eye(self.n)

    def mul(self, a, b):
        return a @ b

    def inv(self, a):
        c = np.linalg.cond(a)
        if not np.isfinite(c) or c > self.cond_max:
            raise ValueError(f"matrix is numerically singular (condition number {c:.3g})")
        return np.linalg.inv(a)

    def eq(self, a, b, tol=None):
        t = self.tol if tol is None else tol
        return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= t * max(1.0, np.max(np.abs(b))))

    def dist(self, a, b) -> float:
        """Frobenius norm of the principal logarithm of ``a^{-1} b``."""
        m = self.inv(a) @ b
        if np.allclose(m, np.eye(self.n), atol=1e-15, rtol=0):
            return 0.0
        return float(np.linalg.norm(scipy.linalg.logm(m), "fro"))

    def random(self, rng):
        while True:
            a = np.eye(self.n) + 0.5 * rng.normal(size=(self.n, self.n))
            if np.linalg.cond(a) < 1e3:
                return a

    def to_json(self, a):
        a = np.asarray(a)
        if np.iscomplexobj(a):
            return [[[float(x.real), float(x.imag)] for x in row] for row in a]
        return [[float(x) for x in row] for row in a]

    def from_json(self, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 3:
            arr = arr[..., 0] + 1j * arr[..., 1]
        if arr.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix")
        return arr

    def describe(self):
        return {"group": self.tag, "n": self.n}


class Affine(Group):
    """Affine maps ``x -> M x + v`` stored as pairs ``(M, v)``."""

    tag = "affine"

    def __init__(self, n: int = 1, tol: float = 1e-10):
        self.n = n
        self.tol = tol
        self._gl = GL(n + 1, tol)

    def _emb(self, a):
        M, v = a
        out = np.eye(self.n + 1)
        out[: self.n, : self.n] = M
        out[: self.n, self.n] = v
        return out

    def _pair(self, m):
        return (m[: self.n, : self.n].copy(), m[: self.n, self.n].copy())

    def identity(self):
        return (np.eye(self.n), np.zeros(self.n))

    def mul(self, a, b):
        (M1, v1), (M2, v2) = a, b
        return (M1 @ M2, M1 @ v2 + v1)

    def inv(self, a):
        M, v = a
        Mi = self._gl.inv(self._emb(a))[: self.n, : self.n]
        return (Mi, -Mi @ v)

    def eq(self, a, b, tol=None):
        return self._gl.eq(self._emb(a), self._emb(b), tol)

    def dist(self, a, b) -> float:
        return self._gl.dist(self._emb(a), self._emb(b))

    def random(self, rng):
        M = GL(self.n).random(rng)
        return (M, rng.normal(size=self.n))

    def to_json(self, a):
        M, v = a
        return {"M": [[float(x) for x in r] for r in M], "v": [float(x) for x in v]}

    def from_json(self, obj):
        return (np.asarray(obj["M"], dtype=float).reshape(self.n, self.n), np.asarray(obj["v"], dtype=float))

    def describe(self):
        return {"group": self.tag, "n": self.n}


class SO2(Group):
    """Plane rotations stored exactly as fractions of a full turn in ``[0, 1)``."""

    tag = "so2"
    exact = True

    def _c(self, t):
        return Fraction(t) % 1

    def identity(self):
        return Fraction(0)

    def mul(self, a, b):
        return (a + b) % 1

    def inv(self, a):
        return (-a) % 1

    def eq(self, a, b, tol=None):
        return (Fraction(a) - Fraction(b)) % 1 == 0

    def dist(self, a, b) -> float:
        """Bi-invariant angular distance in radians."""
        t = (Fraction(b) - Fraction(a)) % 1
        return 2 * math.pi * float(min(t, 1 - t))

    def matrix(self, a) -> np.ndarray:
        th = 2 * math.pi * float(a)
        return np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])

    def random(self, rng):
        return Fraction(int(rng.integers(0, 24)), 24)

    def to_json(self, a):
        return str(a)

    def from_json(self, v):
        return self._c(Fraction(v) if isinstance(v, str) else v)


def group_from_tag(tag: str, n: int = 2, exact: bool = True) -> Group:
    if tag == "pos_real":
        return PosReal(exact=exact)
    if tag == "gl":
        return GL(n)
    if tag == "affine":
        return Affine(n)
    if tag == "so2":
        return SO2()
    raise ValueError(f"unknown group {tag!r}")
