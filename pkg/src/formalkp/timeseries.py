"""Weight-graded power series in the times ``t_1, ..., t_N`` with symbol coefficients.

A term keyed by the multi-index ``m`` stands for ``prod_n t_n^{m_n}`` (no factorial
normalization) and has weight ``sum_n n m_n``.  Only weights ``<= w_max`` are kept.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .scalar import QI
from .symbol import FormalSymbol, sym_compose

__all__ = ["TimeSeriesOperator", "multi_indices", "weight", "ts_compose"]

MultiIndex = tuple


def weight(m: Sequence[int]) -> int:
    return sum((n + 1) * k for n, k in enumerate(m))


@lru_cache(maxsize=None)
def multi_indices(w_max: int, n_times: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of weight ``<= w_max``, ordered by weight then lexicographically."""
    out = []

    def rec(prefix, n, remaining):
        if n > n_times:
            out.append(tuple(prefix))
            return
        for k in range(remaining // n + 1):
            rec(prefix + [k], n + 1, remaining - k * n)

    rec([], 1, w_max)
    return tuple(sorted(out, key=lambda m: (weight(m), m)))


def _sub(m, a):
    return tuple(x - y for x, y in zip(m, a))


def _le(a, m):
    return all(x <= y for x, y in zip(a, m))


@lru_cache(maxsize=None)
def _splits(m: MultiIndex) -> tuple[tuple[MultiIndex, MultiIndex], ...]:
    """All ordered pairs ``(a, m - a)`` with ``a <= m`` componentwise."""
    ranges = [range(k + 1) for k in m]
    out = []

    def rec(prefix, i):
        if i == len(m):
            a = tuple(prefix)
            out.append((a, _sub(m, a)))
            return
        for v in ranges[i]:
            rec(prefix + [v], i + 1)

    rec([], 0)
    return tuple(out)


class TimeSeriesOperator:
    """Series ``sum_m A_m t^m`` truncated at weight ``w_max``.

    Parameters
    ----------
    terms : mapping
        Multi-index (length ``n_times``) to :class:`FormalSymbol`.
    n_times, w_max : int
        Number of active times and weight cutoff.
    h_offset : int, optional
        For h-graded series: the h-degree of the term ``m`` is ``weight(m) + h_offset``.
    """

    __slots__ = ("n_times", "w_max", "dim", "exact", "h_offset", "_terms")

    def __init__(self, terms: Mapping[MultiIndex, FormalSymbol], n_times: int, w_max: int,
                 dim: int | None = None, exact: bool | None = None, h_offset: int | None = None):
        self.n_times = int(n_times)
        self.w_max = int(w_max)
        first = next(iter(terms.values()), None)
        self.dim = dim if dim is not None else (first.dim if first else 1)
        self.exact = exact if exact is not None else (first.exact if first else True)
        self.h_offset = h_offset
        t = {}
        for m, A in terms.items():
            m = tuple(int(x) for x in m)
            if len(m) != self.n_times:
                raise ValueError(f"multi-index {m} does not have {self.n_times} entries")
            if weight(m) > self.w_max:
                continue
            if A.is_zero() and A.depth is None:
                continue
            t[m] = A
        self._terms = t

    # ------------------------------------------------------------------ basics
    @classmethod
    def constant(cls, A: FormalSymbol, n_times: int, w_max: int) -> "TimeSeriesOperator":
        return cls({(0,) * n_times: A}, n_times, w_max, A.dim, A.exact)

    @property
    def terms(self) -> dict[MultiIndex, FormalSymbol]:
        return dict(self._terms)

    def __getitem__(self, m) -> FormalSymbol:
        m = tuple(m)
        A = self._terms.get(m)
        if A is None:
            return FormalSymbol.zero(self.dim, self.exact)
        return A

    def __contains__(self, m):
        return tuple(m) in self._terms

    def indices(self) -> tuple[MultiIndex, ...]:
        return multi_indices(self.w_max, self.n_times)

    def _like(self, terms, w_max=None, h_offset=...) -> "TimeSeriesOperator":
        return TimeSeriesOperator(terms, self.n_times, self.w_max if w_max is None else w_max,
                                  self.dim, self.exact, self.h_offset if h_offset is ... else h_offset)

    def map(self, fn: Callable[[MultiIndex, FormalSymbol], FormalSymbol]) -> "TimeSeriesOperator":
        return self._like({m: fn(m, A) for m, A in self._terms.items()})

    def truncate_weight(self, w: int) -> "TimeSeriesOperator":
        return self._like({m: A for m, A in self._terms.items() if weight(m) <= w}, w_max=w)

    def truncate_depth(self, depth: int | None) -> "TimeSeriesOperator":
        return self.map(lambda m, A: A.truncate(depth))

    def _check(self, other: "TimeSeriesOperator"):
        if not isinstance(other, TimeSeriesOperator):
            raise TypeError(f"expected TimeSeriesOperator, got {type(other).__name__}")
        if other.n_times != self.n_times:
            raise ValueError(f"time count mismatch: {self.n_times} vs {other.n_times}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "TimeSeriesOperator"):
        self._check(other)
        w = min(self.w_max, other.w_max)
        t = {m: A for m, A in self._terms.items() if weight(m) <= w}
        for m, B in other._terms.items():
            if weight(m) > w:
                continue
            t[m] = t[m] + B if m in t else B
        return self._like(t, w_max=w, h_offset=_h_same(self.h_offset, other.h_offset))

    def __neg__(self):
        return self.map(lambda m, A: -A)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TimeSeriesOperator":
        return self.map(lambda m, A: A.scale(c))

    def compose(self, other: "TimeSeriesOperator", depth: int | None = None,
                w_max: int | None = None) -> "TimeSeriesOperator":
        return ts_compose(self, other, depth, w_max)

    def derivative_t(self, k: int) -> "TimeSeriesOperator":
        """``d/dt_k``, valid on weights ``<= w_max - k``."""
        if not 1 <= k <= self.n_times:
            raise ValueError(f"time t_{k} is not active")
        t = {}
        for m, A in self._terms.items():
            if m[k - 1] == 0:
                continue
            mm = list(m)
            mm[k - 1] -= 1
            t[tuple(mm)] = A.scale(m[k - 1])
        h = None if self.h_offset is None else self.h_offset + k
        return self._like(t, w_max=self.w_max - k, h_offset=h)

    def inverse(self, depth: int | None = None) -> "TimeSeriesOperator":
        """Inverse of ``1 + (positive weight)`` by the recursion ``B_m = -sum_{a != 0} A_a B_{m-a}``."""
        zero = (0,) * self.n_times
        if not self[zero].agrees(FormalSymbol.identity(self.dim, self.exact)):
            raise ValueError("weight-0 term must be the identity")
        B = {zero: FormalSymbol.identity(self.dim, self.exact)}
        for m in self.indices():
            if m == zero:
                continue
            acc = None
            for a, b in _splits(m):
                if a == zero or a not in self._terms or b not in B:
                    continue
                t = sym_compose(self._terms[a], B[b], depth)
                acc = t if acc is None else acc + t
            if acc is not None:
                B[m] = -acc
        h = None if self.h_offset is None else -self.h_offset
        return self._like(B, h_offset=h)

    def max_abs(self) -> float:
        return max((A.max_abs() for A in self._terms.values()), default=0.0)

    def agrees(self, other: "TimeSeriesOperator", depth: int | None = None, w_max: int | None = None,
               tol: float = 0.0) -> bool:
        w = min(self.w_max, other.w_max) if w_max is None else w_max
        for m in multi_indices(w, self.n_times):
            if not self[m].agrees(other[m], depth, tol):
                return False
        return True

    def min_depth_claim(self) -> int | None:
        """Coarsest window over stored terms (None when all are complete)."""
        ds = [A.depth for A in self._terms.values() if A.depth is not None]
        return max(ds) if ds else None

    def __repr__(self):
        return f"TimeSeriesOperator(n_times={self.n_times}, w_max={self.w_max}, terms={len(self._terms)})"

    def to_json(self) -> dict:
        return {
            "n_times": self.n_times,
            "w_max": self.w_max,
            "h_offset": self.h_offset,
            "terms": {",".join(map(str, m)): A.to_json() for m, A in sorted(self._terms.items())},
        }


def _h_same(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a != b:
        raise ValueError(f"adding h-graded series with different h offsets {a}, {b}")
    return a


def ts_compose(A: TimeSeriesOperator, B: TimeSeriesOperator, depth: int | None = None,
               w_max: int | None = None, order: Iterable[MultiIndex] | None = None) -> TimeSeriesOperator:
    """``(AB)_m = sum_{a + b = m} A_a o B_b`` on weights ``<= w_max``."""
    A._check(B)
    w = min(A.w_max, B.w_max) if w_max is None else min(w_max, A.w_max, B.w_max)
    out = {}
    for m in (order if order is not None else multi_indices(w, A.n_times)):
        acc = None
        for a, b in _splits(m):
            Aa = A._terms.get(a)
            if Aa is None:
                continue
            Bb = B._terms.get(b)
            if Bb is None:
                continue
            t = sym_compose(Aa, Bb, depth)
            acc = t if acc is None else acc + t
        if acc is not None:
            out[m] = acc
    h = None
    if A.h_offset is not None or B.h_offset is not None:
        h = (A.h_offset or 0) + (B.h_offset or 0)
    return TimeSeriesOperator(out, A.n_times, w, A.dim, A.exact, h)
