"""Pairwise comparison matrices over a group: consistency, gauge actions, holonomy on graphs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .groups import Group, PosReal

__all__ = [
    "PCMatrix",
    "PCReport",
    "pc_validate",
    "pc_is_consistent",
    "koczkodaj_kii",
    "koczkodaj_triad",
    "generic_ii",
    "gauge_act",
    "consistent_from_weights",
    "recover_weights",
    "InconsistentError",
    "left_orbit_consistentize",
    "OrbitResult",
    "graph_holonomy",
    "ranked_kii",
    "DistanceMatrix",
    "distance_matrix",
    "enumerate_pc_from_distance",
    "LEFT_ORBIT_COUNTEREXAMPLE",
]


class InconsistentError(ValueError):
    """Raised by :func:`recover_weights` with a violating witness."""

    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


@dataclass
class PCMatrix:
    """Entries ``a[i][j]`` in ``group``; ``None`` marks a hole of a graph-supported matrix."""

    group: Group
    entries: list

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def from_upper(cls, group: Group, n: int, upper: dict) -> "PCMatrix":
        """Build from ``{(i, j): a_ij}`` with ``i < j``; missing pairs become holes."""
        e = [[None] * n for _ in range(n)]
        for i in range(n):
            e[i][i] = group.identity()
        for (i, j), v in upper.items():
            if not i < j:
                raise ValueError(f"upper entries need i < j, got {(i, j)}")
            if isinstance(v, (int, str)):
                v = group.from_json(v)
            e[i][j] = v
            e[j][i] = group.inv(v)
        return cls(group, e)

    def is_dense(self) -> bool:
        return all(x is not None for row in self.entries for x in row)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(self.n) if i != j and self.entries[i][j] is not None]

    def neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.n) if j != i and self.entries[i][j] is not None]

    def transpose(self) -> "PCMatrix":
        return PCMatrix(self.group, [[self.entries[j][i] for j in range(self.n)] for i in range(self.n)])

    def map(self, fn: Callable[[int, int, object], object]) -> "PCMatrix":
        return PCMatrix(self.group, [[None if x is None else fn(i, j, x) for j, x in enumerate(row)]
                                     for i, row in enumerate(self.entries)])

    def equals(self, other: "PCMatrix", tol: float | None = None) -> bool:
        if self.n != other.n:
            return False
        for i in range(self.n):
            for j in range(self.n):
                a, b = self.entries[i][j], other.entries[i][j]
                if (a is None) != (b is None):
                    return False
                if a is not None and not self.group.eq(a, b, tol):
                    return False
        return True

    def to_json(self) -> dict:
        out = dict(self.group.describe())
        out["n"] = self.n
        out["entries"] = [[None if x is None else self.group.to_json(x) for x in row] for row in self.entries]
        return out

    @classmethod
    def from_json(cls, obj: dict, group: Group) -> "PCMatrix":
        e = [[None if x is None else group.from_json(x) for x in row] for row in obj["entries"]]
        if "support" in obj:
            sup = obj["support"]
            e = [[x if (i == j or sup[i][j]) else None for j, x in enumerate(row)] for i, row in enumerate(e)]
        return cls(group, e)


@dataclass
class PCReport:
    ok: bool
    errors: list = field(default_factory=list)


def pc_validate(A: PCMatrix, tol: float | None = None) -> PCReport:
    """Check ``a_ii = 1``, ``a_ji = a_ij^{-1}``, symmetric support and connectedness."""
    G, n = A.group, A.n
    errs = []
    if any(len(r) != n for r in A.entries):
        return PCReport(False, ["matrix is not square"])
    for i in range(n):
        if A.entries[i][i] is None or not G.is_identity(A.entries[i][i], tol):
            errs.append(f"a[{i}][{i}] is not the identity")
        for j in range(i + 1, n):
            a, b = A.entries[i][j], A.entries[j][i]
            if (a is None) != (b is None):
                errs.append(f"support is not symmetric at ({i},{j})")
            elif a is not None and not G.eq(G.mul(a, b), G.identity(), tol):
                errs.append(f"a[{j}][{i}] is not the inverse of a[{i}][{j}]")
    if not _connected(A):
        errs.append("support graph is not connected")
    return PCReport(not errs, errs)


def _connected(A: PCMatrix) -> bool:
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in A.neighbors(i):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == A.n


def _triads(A: PCMatrix):
    for i, j, k in itertools.combinations(range(A.n), 3):
        if all(A.entries[x][y] is not None for x, y in ((i, j), (j, k), (i, k))):
            yield i, j, k


def pc_is_consistent(A: PCMatrix, tol: float | None = None, variant: str = "covariant") -> bool:
    """``a_ij a_jk = a_ik`` (covariant) or ``a_jk a_ij = a_ik`` (contravariant).

    Dense matrices are checked on all ordered triads; graph-supported ones by
    rebuilding weights along a spanning tree and checking every edge.
    """
    G = A.group
    if variant not in ("covariant", "contravariant"):
        raise ValueError(f"unknown variant {variant!r}")
    if not A.is_dense():
        try:
            recover_weights(A, tol, variant)
        except InconsistentError:
            return False
        return True
    for i, j, k in itertools.permutations(range(A.n), 3):
        a, b, c = A.entries[i][j], A.entries[j][k], A.entries[i][k]
        lhs = G.mul(a, b) if variant == "covariant" else G.mul(b, a)
        if not G.eq(lhs, c, tol):
            return False
    return True


def koczkodaj_triad(a, b, c):
    """``min(|1 - b/(ac)|, |1 - ac/b|)`` for the triad ``(a_ij, a_ik, a_jk)``."""
    return min(abs(1 - b / (a * c)), abs(1 - (a * c) / b))


def koczkodaj_kii(A: PCMatrix):
    """Koczkodaj inconsistency: max over triads, in ``[0, 1)``; exact for exact entries."""
    if not isinstance(A.group, PosReal):
        raise TypeError("Koczkodaj's index is defined for positive reals")
    best = Fraction(0) if A.group.exact else 0.0
    for i, j, k in _triads(A):
        v = koczkodaj_triad(A.entries[i][j], A.entries[i][k], A.entries[j][k])
        best = max(best, v)
    return best


def generic_ii(A: PCMatrix) -> float:
    """``sup d/(1 + d)`` with ``d = d(a_ik, a_ij a_jk)`` over triads, for metric groups."""
    G = A.group
    best = 0.0
    for i, j, k in _triads(A):
        d = G.dist(A.entries[i][k], G.mul(A.entries[i][j], A.entries[j][k]))
        best = max(best, d / (1 + d))
    return best


def gauge_act(side: str, g: Sequence, A: PCMatrix) -> PCMatrix:
    """Gauge actions of ``G^n`` on PC matrices.

    ``L``: ``g_i a_ij`` (i < j), ``a_ij g_j^{-1}`` (i > j);
    ``R``: ``a_ij g_j`` (i < j), ``g_i^{-1} a_ij`` (i > j);
    ``Ad``: ``g_i a_ij g_j^{-1}``; ``coAd``: ``g_i^{-1} a_ij g_j``.
    """
    G = A.group
    if len(g) != A.n:
        raise ValueError(f"gauge vector has length {len(g)}, matrix has size {A.n}")
    gi = [G.inv(x) for x in g]

    def f(i, j, a):
        if i == j:
            return a
        if side == "L":
            return G.mul(g[i], a) if i < j else G.mul(a, gi[j])
        if side == "R":
            return G.mul(a, g[j]) if i < j else G.mul(gi[i], a)
        if side == "Ad":
            return G.prod(g[i], a, gi[j])
        if side == "coAd":
            return G.prod(gi[i], a, g[j])
        raise ValueError(f"unknown side {side!r}")

    return A.map(f)


def consistent_from_weights(group: Group, lam: Sequence) -> PCMatrix:
    """``a_ij = lam_i^{-1} lam_j``."""
    n = len(lam)
    inv = [group.inv(x) for x in lam]
    e = [[group.identity() if i == j else group.mul(inv[i], lam[j]) for j in range(n)] for i in range(n)]
    return PCMatrix(group, e)


def recover_weights(A: PCMatrix, tol: float | None = None, variant: str = "covariant") -> list:
    """Weights with ``a_ij = lam_i^{-1} lam_j`` and ``lam_0 = 1`` (covariant), via a BFS tree.

    Raises
    ------
    InconsistentError
        With the first edge ``(i, j)`` whose entry disagrees with the tree weights.
    """
    G = A.group
    if not _connected(A):
        raise ValueError("support graph is not connected")
    lam = [None] * A.n
    lam[0] = G.identity()
    order = [0]
    for i in order:
        for j in A.neighbors(i):
            if lam[j] is None:
                a = A.entries[i][j]
                lam[j] = G.mul(lam[i], a) if variant == "covariant" else G.mul(a, lam[i])
                order.append(j)
    for i, j in A.edges():
        a = A.entries[i][j]
        pred = G.mul(G.inv(lam[i]), lam[j]) if variant == "covariant" else G.mul(lam[j], G.inv(lam[i]))
        if not G.eq(pred, a, tol):
            raise InconsistentError(f"edge ({i},{j}) violates consistency", (i, j))
    return lam


@dataclass
class OrbitResult:
    success: bool
    gauge: list | None
    certificate: dict = field(default_factory=dict)


# A 4x4 positive-real matrix whose left orbit misses the consistent matrices:
# a13 a24 / (a14 a23) is invariant under the left action and equals 1 on consistent matrices.
LEFT_ORBIT_COUNTEREXAMPLE = {(0, 1): Fraction(2), (0, 2): Fraction(3), (0, 3): Fraction(5),
                             (1, 2): Fraction(7), (1, 3): Fraction(11), (2, 3): Fraction(13)}


def _left_invariant_ratio(A: PCMatrix):
    e = A.entries
    return (e[0][2] * e[1][3]) / (e[0][3] * e[1][2])


def left_orbit_consistentize(A: PCMatrix, rng: np.random.Generator | None = None,
                             n_random: int = 2000, grid: int = 9) -> OrbitResult:
    """Find ``g`` with ``L_g(A)`` consistent.

    For ``n = 3`` the solution ``g = (1, a12^{-1} a13 a23^{-1}, 1)`` always works.
    For ``n = 4`` over positive reals the search is randomized plus a log grid
    on ``(g_1, g_2, g_3)``; a failure certificate records the best index found
    and the left-invariant cross ratio ``a13 a24 / (a14 a23)``.
    """
    G = A.group
    n = A.n
    if n < 3:
        raise ValueError("need at least three alternatives")
    if n == 3:
        a12, a13, a23 = A.entries[0][1], A.entries[0][2], A.entries[1][2]
        g = [G.identity(), G.prod(G.inv(a12), a13, G.inv(a23)), G.identity()]
        B = gauge_act("L", g, A)
        if not pc_is_consistent(B):
            raise RuntimeError("constructive left-orbit solution failed")
        return OrbitResult(True, g, {"method": "constructive"})
    if n != 4 or not isinstance(G, PosReal):
        raise NotImplementedError("left-orbit search is implemented for n = 4 over positive reals")
    rng = rng or np.random.default_rng(0)
    Af = PCMatrix(PosReal(exact=False), [[float(x) for x in row] for row in A.entries])

    def score(logs):
        g = [math.exp(x) for x in logs] + [1.0]
        return koczkodaj_kii(gauge_act("L", g, Af))

    best, best_g = math.inf, None
    tried = 0
    for _ in range(n_random):
        x = rng.normal(scale=3.0, size=3)
        s = score(x)
        tried += 1
        if s < best:
            best, best_g = s, x
    span = np.linspace(-6, 6, grid)
    for x in itertools.product(span, repeat=3):
        s = score(np.array(x))
        tried += 1
        if s < best:
            best, best_g = s, np.array(x)
    ratio = _left_invariant_ratio(A)
    if best <= 1e-12:
        return OrbitResult(True, [math.exp(x) for x in best_g] + [1.0], {"samples": tried})
    cert = {"samples": tried, "best_kii": best, "best_log_gauge": [float(x) for x in best_g],
            "invariant_ratio": str(ratio) if isinstance(ratio, Fraction) else float(ratio),
            "invariant_ratio_is_one": ratio == 1}
    return OrbitResult(False, None, cert)


# ---------------------------------------------------------------------- holonomy on graphs
def _dedupe_add(G: Group, bucket: list, x) -> bool:
    for y in bucket:
        if G.eq(x, y):
            return False
    bucket.append(x)
    return True


def _walk_products(A: PCMatrix, s: int, l_max: int) -> list[dict[int, list]]:
    """``layers[L][v]``: distinct products ``a_{s v1} a_{v1 v2} ... a_{v_{L-1} v}`` over walks of length L."""
    G = A.group
    layers = [{s: [G.identity()]}]
    for _ in range(l_max):
        nxt: dict[int, list] = {}
        for v, elems in layers[-1].items():
            for w in A.neighbors(v):
                a = A.entries[v][w]
                bucket = nxt.setdefault(w, [])
                for h in elems:
                    _dedupe_add(G, bucket, G.mul(h, a))
        layers.append(nxt)
    return layers


def graph_holonomy(A: PCMatrix, s: int, s2: int | None = None, l_max: int = 6) -> list[tuple[object, int]]:
    """Distinct products along walks from ``s`` to ``s2`` (loops at ``s`` by default).

    Each element is paired with the shortest walk length realizing it within ``l_max``.
    """
    G = A.group
    s2 = s if s2 is None else s2
    if not _connected(A):
        raise ValueError("support graph is not connected")
    layers = _walk_products(A, s, l_max)
    out: list[tuple[object, int]] = []
    for L, layer in enumerate(layers):
        for h in layer.get(s2, ()):
            if all(not G.eq(h, x) for x, _ in out):
                out.append((h, L))
    return out


def _default_F(G: Group):
    def F(h):
        d = G.dist(G.identity(), h)
        return d / (1 + d)
    return F


def ranked_kii(A: PCMatrix, base: int = 0, l_max: int = 6, F: Callable | None = None) -> list[float]:
    """``a_L = max F(h)`` over loops at ``base`` of length exactly ``L``, for ``L = 0..l_max``."""
    F = F or _default_F(A.group)
    layers = _walk_products(A, base, l_max)
    return [max((F(h) for h in layer.get(base, ())), default=0.0) for layer in layers]


# ---------------------------------------------------------------------- distance matrices
@dataclass
class DistanceMatrix:
    """``k_ij = |log a_ij|`` with the exact representatives ``r_ij = max(a_ij, 1/a_ij)``."""

    values: np.ndarray
    ratios: list

    @property
    def n(self) -> int:
        return len(self.ratios)


def distance_matrix(A: PCMatrix) -> DistanceMatrix:
    if not isinstance(A.group, PosReal) or not A.is_dense():
        raise TypeError("distance matrices are defined for dense positive-real PC matrices")
    n = A.n
    r = [[max(x, 1 / x) for x in row] for row in A.entries]
    K = np.array([[abs(math.log(x)) for x in row] for row in A.entries])
    return DistanceMatrix(K, r)


def enumerate_pc_from_distance(K: DistanceMatrix, group: PosReal | None = None) -> list[PCMatrix]:
    """All PC matrices with the given distance matrix: one sign choice per nonzero pair, ``2^{N/2}`` in total."""
    G = group or PosReal(exact=isinstance(K.ratios[0][0], Fraction))
    n = K.n
    free = [(i, j) for i in range(n) for j in range(i + 1, n) if K.ratios[i][j] != 1]
    out = []
    for signs in itertools.product((1, -1), repeat=len(free)):
        upper = {(i, j): K.ratios[i][j] for i in range(n) for j in range(i + 1, n)}
        for (i, j), s in zip(free, signs):
            if s < 0:
                upper[(i, j)] = 1 / upper[(i, j)]
        out.append(PCMatrix.from_upper(G, n, upper))
    return out
